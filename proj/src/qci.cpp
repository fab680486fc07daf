#include "qdyn/qci.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qdyn {

namespace {

constexpr std::array<const char*, 86> kSymbols = {
    "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg", "Al", "Si", "P",  "S",  "Cl",
    "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se",
    "Br", "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In", "Sn", "Sb",
    "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er",
    "Tm", "Yb", "Lu", "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At",
    "Rn"};


}  // namespace

int atomic_number(const std::string& symbol) {
  for (std::size_t i = 0; i < kSymbols.size(); ++i)
    if (symbol == kSymbols[i]) return static_cast<int>(i) + 1;
  throw std::invalid_argument("unknown element '" + symbol + "'");
}

Eigen::MatrixXd coulomb_matrix(const std::vector<Eigen::Vector3d>& positions, const std::vector<double>& charges) {
  const int n = static_cast<int>(positions.size());
  if (static_cast<int>(charges.size()) != n) throw std::invalid_argument("positions and charges differ in length");
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    M(i, i) = 0.5 * std::pow(charges[i], 2.4);
    for (int j = i + 1; j < n; ++j) {
      double d = (positions[i] - positions[j]).norm();
      if (!(d > 0.0)) throw std::invalid_argument("coincident atoms " + std::to_string(i) + " and " + std::to_string(j));
      M(i, j) = M(j, i) = charges[i] * charges[j] / d;
    }
  }
  return M;
}

Eigen::VectorXd features(const std::vector<Eigen::Vector3d>& positions, const std::vector<double>& charges, int p,
                         int q) {
  if (p < 1 || q < 1) throw std::invalid_argument("p and q must be positive");
  Eigen::MatrixXd M = coulomb_matrix(positions, charges);
  Eigen::MatrixXd N = M.cwiseInverse();
  Eigen::VectorXd base(2 * p);
  Eigen::MatrixXd Mk = M, Nk = N;
  for (int k = 0; k < p; ++k) {
    if (k > 0) {
      Mk = Mk * M;
      Nk = Nk * N;
    }
    base(k) = Mk.squaredNorm();
    base(p + k) = Nk.squaredNorm();
  }
  Eigen::VectorXd u(2 * p * q);
  for (int r = 0; r < q; ++r) u.segment(2 * p * r, 2 * p) = base.array().pow(r + 1).matrix();
  return u;
}

void FingerprintModel::validate() const {
  if (p < 1 || q < 1) throw std::invalid_argument(species + ": p and q must be positive");
  if (w.size() != 2 * p * q)
    throw std::invalid_argument(species + ": expected " + std::to_string(2 * p * q) + " weights, got " +
                                std::to_string(w.size()));
  if (!permutation.empty()) {
    if (static_cast<int>(permutation.size()) != w.size())
      throw std::invalid_argument(species + ": permutation length mismatch");
    std::vector<int> s = permutation;
    std::sort(s.begin(), s.end());
    for (int i = 0; i < static_cast<int>(s.size()); ++i)
      if (s[i] != i) throw std::invalid_argument(species + ": permutation is not a bijection");
  }
}

double FingerprintModel::score(const Eigen::VectorXd& u) const {
  if (u.size() != w.size())
    throw std::invalid_argument(species + ": feature length " + std::to_string(u.size()) + " != " +
                                std::to_string(w.size()));
  double s = b;
  for (int i = 0; i < w.size(); ++i) s += w(i) * u(permutation.empty() ? i : permutation[i]);
  return s;
}

bool fingerprint(const Eigen::VectorXd& u, const FingerprintModel& m) { return m.score(u) > 0.0; }

std::vector<FingerprintModel> load_fingerprint_models(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open fingerprint models " + path);
  auto j = nlohmann::json::parse(f, nullptr, true, true);
  std::vector<FingerprintModel> out;
  for (const auto& e : j.at("models")) {
    FingerprintModel m;
    m.species = e.at("species").get<std::string>();
    m.formula = e.at("formula").get<std::map<std::string, int>>();
    m.p = e.value("p", 2);
    m.q = e.value("q", 3);
    auto w = e.at("w").get<std::vector<double>>();
    m.w = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    m.b = e.at("b").get<double>();
    if (e.contains("permutation")) m.permutation = e.at("permutation").get<std::vector<int>>();
    m.validate();
    for (const auto& [el, c] : m.formula) {
      atomic_number(el);
      if (c < 1) throw std::invalid_argument(m.species + ": formula counts must be positive");
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::string default_fingerprint_path() { return std::string(QDYN_DATA_DIR) + "/fingerprints.json"; }

std::vector<Frame> parse_xyz(const std::string& text) {
  std::istringstream in(text);
  std::vector<Frame> frames;
  std::string line;
  int lineno = 0;
  auto next = [&](std::string& l) {
    ++lineno;
    return static_cast<bool>(std::getline(in, l));
  };
  while (next(line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream hs(line);
    long n = -1;
    if (!(hs >> n) || n < 0) throw std::invalid_argument("xyz line " + std::to_string(lineno) + ": bad atom count");
    Frame f;
    if (!next(f.comment)) throw std::invalid_argument("xyz: missing comment line");
    for (long i = 0; i < n; ++i) {
      if (!next(line)) throw std::invalid_argument("xyz: truncated frame");
      std::istringstream ls(line);
      std::string sym;
      double x, y, z;
      if (!(ls >> sym >> x >> y >> z)) throw std::invalid_argument("xyz line " + std::to_string(lineno) + ": bad atom");
      atomic_number(sym);
      f.symbols.push_back(sym);
      f.positions.emplace_back(x, y, z);
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<Frame> load_xyz(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_xyz(ss.str());
}

Indicator model_indicator(const FingerprintModel& m) {
  return [m](const std::vector<Eigen::Vector3d>& x, const std::vector<double>& z) {
    return fingerprint(features(x, z, m.p, m.q), m);
  };
}

SpeciesRuleSet rules_from_models(const std::vector<FingerprintModel>& models) {
  SpeciesRuleSet rs;
  for (const auto& m : models) rs.rules.push_back({m.species, m.formula, model_indicator(m)});
  // A contains B when B's formula fits inside A's and they differ.
  for (const auto& a : rs.rules)
    for (const auto& b : rs.rules) {
      if (a.species == b.species) continue;
      bool fits = true;
      for (const auto& [el, c] : b.formula) {
        auto it = a.formula.find(el);
        fits = fits && it != a.formula.end() && it->second >= c;
      }
      if (fits && a.formula != b.formula) rs.exclusions.emplace_back(a.species, b.species);
    }
  return rs;
}

namespace {

std::int64_t binom(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > (std::int64_t{1} << 50)) return r;
  }
  return r;
}

void combinations(const std::vector<int>& pool, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  const int n = static_cast<int>(pool.size());
  if (k > n) return;
  while (true) {
    std::vector<int> c(k);
    for (int i = 0; i < k; ++i) c[i] = pool[idx[i]];
    out.push_back(std::move(c));
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

bool overlaps(const std::vector<int>& a, const std::vector<int>& b) {
  for (int x : a)
    if (std::binary_search(b.begin(), b.end(), x)) return true;
  return false;
}

}  // namespace

std::vector<std::vector<int>> firing_candidates(const Frame& f, const SpeciesRule& rule, std::int64_t cap) {
  std::map<std::string, std::vector<int>> by_el;
  for (int i = 0; i < static_cast<int>(f.symbols.size()); ++i) by_el[f.symbols[i]].push_back(i);
  std::int64_t total = 1;
  for (const auto& [el, c] : rule.formula) {
    total *= binom(static_cast<std::int64_t>(by_el[el].size()), c);
    if (total == 0) return {};
    if (total > cap)
      throw BudgetError(rule.species + ": candidate count exceeds cap " + std::to_string(cap));
  }
  std::vector<std::vector<int>> partial{{}};
  for (const auto& [el, c] : rule.formula) {
    std::vector<std::vector<int>> combos;
    combinations(by_el[el], c, combos);
    std::vector<std::vector<int>> next;
    for (const auto& p : partial)
      for (const auto& cmb : combos) {
        auto v = p;
        v.insert(v.end(), cmb.begin(), cmb.end());
        next.push_back(std::move(v));
      }
    partial = std::move(next);
  }
  std::vector<std::vector<int>> firing;
  for (auto& cand : partial) {
    std::vector<Eigen::Vector3d> x;
    std::vector<double> z;
    for (int i : cand) {
      x.push_back(f.positions[i]);
      z.push_back(atomic_number(f.symbols[i]));
    }
    if (rule.indicator(x, z)) {
      std::sort(cand.begin(), cand.end());
      firing.push_back(std::move(cand));
    }
  }
  std::sort(firing.begin(), firing.end());
  return firing;
}

int max_disjoint(const std::vector<std::vector<int>>& sets, std::int64_t search_cap) {
  const int n = static_cast<int>(sets.size());
  std::vector<std::vector<char>> clash(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) clash[i][j] = clash[j][i] = overlaps(sets[i], sets[j]);
  int best = 0;
  std::int64_t nodes = 0;
  std::vector<int> chosen;
  std::function<void(int)> rec = [&](int i) {
    if (++nodes > search_cap) throw BudgetError("disjoint-set search exceeds cap " + std::to_string(search_cap));
    if (static_cast<int>(chosen.size()) + (n - i) <= best) return;
    if (i == n) {
      best = static_cast<int>(chosen.size());
      return;
    }
    bool ok = true;
    for (int c : chosen) ok = ok && !clash[c][i];
    if (ok) {
      chosen.push_back(i);
      rec(i + 1);
      chosen.pop_back();
    }
    rec(i + 1);
  };
  rec(0);
  return best;
}

std::map<std::string, int> species_counts(const Frame& f, const SpeciesRuleSet& rules) {
  if (f.symbols.size() != f.positions.size()) throw std::invalid_argument("frame symbols and positions differ");
  std::map<std::string, std::vector<std::vector<int>>> firing;
  for (const auto& r : rules.rules) firing[r.species] = firing_candidates(f, r, rules.candidate_cap);
  std::map<std::string, int> counts;
  for (const auto& r : rules.rules) {
    std::vector<std::vector<int>> kept;
    for (const auto& cand : firing[r.species]) {
      bool excluded = false;
      for (const auto& [container, contained] : rules.exclusions) {
        if (contained != r.species) continue;
        auto it = firing.find(container);
        if (it == firing.end()) continue;
        for (const auto& c : it->second) excluded = excluded || overlaps(cand, c);
      }
      if (!excluded) kept.push_back(cand);
    }
    counts[r.species] = max_disjoint(kept, rules.search_cap);
  }
  return counts;
}

std::vector<std::map<std::string, int>> classify_trajectory(const std::vector<Frame>& frames,
                                                            const SpeciesRuleSet& rules) {
  std::vector<std::map<std::string, int>> out(frames.size());
  if (frames.empty()) return out;
  auto roster = [](const Frame& f) {
    auto s = f.symbols;
    std::sort(s.begin(), s.end());
    return s;
  };
  const auto r0 = roster(frames[0]);
  for (std::size_t i = 1; i < frames.size(); ++i)
    if (roster(frames[i]) != r0) throw std::invalid_argument("atom roster changes at frame " + std::to_string(i));
  std::vector<std::string> err(frames.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < frames.size(); ++i) {
    try {
      out[i] = species_counts(frames[i], rules);
    } catch (const std::exception& e) {
      err[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < frames.size(); ++i)
    if (!err[i].empty()) throw std::runtime_error("frame " + std::to_string(i) + ": " + err[i]);
  return out;
}

}  // namespace qdyn
