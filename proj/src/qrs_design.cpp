#include "qdyn/qrs_design.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"

namespace qdyn {

TypeIRow ReferenceTable::nonlocal_row(const std::string& label, int l, int alpha) const {
  if (auto it = overrides.find({label, l, alpha}); it != overrides.end()) return it->second;
  if (l < 0 || l > 2) throw std::invalid_argument("no reference row for l=" + std::to_string(l));
  return nonlocal[l];
}

namespace {

TypeIRow row_from_json(const nlohmann::json& j) {
  TypeIRow r;
  r.kstar_coef = j.at("kstar").get<double>();
  r.gamma_coef = j.at("gamma").get<double>();
  if (j.contains("log_d"))
    r.d = std::exp(j.at("log_d").get<double>());
  else
    r.d = j.at("d").get<double>();
  return r;
}

}  // namespace

ReferenceTable load_reference_table(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open reference table " + path);
  auto j = nlohmann::json::parse(f, nullptr, true, true);
  ReferenceTable t;
  for (int l = 0; l < 3; ++l) t.nonlocal[l] = row_from_json(j.at("nonlocal").at(std::to_string(l)));
  for (int s = -1; s <= 3; ++s) t.local[s + 1] = row_from_json(j.at("local").at(std::to_string(s)));
  if (j.contains("overrides"))
    for (const auto& o : j.at("overrides"))
      t.overrides[{o.at("label").get<std::string>(), o.at("l").get<int>(), o.at("alpha").get<int>()}] =
          row_from_json(o);
  return t;
}

std::string default_reference_table_path() { return std::string(QDYN_DATA_DIR) + "/qrs_reference.json"; }

std::string to_string(Family f) {
  switch (f) {
    case Family::Type1: return "type1";
    case Family::Type2: return "type2";
    case Family::Type3: return "type3";
    case Family::Qho: return "qho";
  }
  return "?";
}

double box_constant() { return std::cbrt(M_PI / 6); }

ReferenceSpec type1_spec(const TypeIRow& row, double plateau) {
  ReferenceSpec s;
  s.family = Family::Type1;
  s.k_star = row.kstar_coef * box_constant();
  s.gamma = row.gamma_coef / std::sqrt(3.0);
  s.d = row.d;
  s.plateau = plateau;
  return s;
}

ReferenceSpec type2_spec(double lambda_ir) {
  if (!(lambda_ir > 0.0)) throw std::invalid_argument("ladder unit must be positive");
  ReferenceSpec s;
  s.family = Family::Type2;
  s.ladder_ir = lambda_ir;
  return s;
}

ReferenceSpec type3_spec(const TypeIRow& row) {
  ReferenceSpec s = type1_spec(row, 0.0);
  s.family = Family::Type3;
  s.ladder_ir = 1.0;
  return s;
}

namespace {

double max_abs(const Eigen::Vector3d& v) { return v.cwiseAbs().maxCoeff(); }

// 2^{1-mu} / unit with mu = 1 + floor(log2(R / unit)); zero below the unit.
double ladder(double R, double unit) {
  double u = R / unit;
  if (u <= 0.0) throw std::domain_error("ladder reference at zero momentum");
  double mu = 1.0 + std::floor(std::log2(u));
  return std::exp2(1.0 - mu) / unit;
}

}  // namespace

double reference_type1(const ReferenceSpec& s, const Eigen::Vector3d& x) {
  if (max_abs(x) <= s.k_star) return s.plateau;
  return s.d * std::exp(-s.gamma * x.lpNorm<1>());
}

double reference_type2(const ReferenceSpec& s, const Eigen::Vector3d& k) {
  double R = max_abs(k);
  if (R == 0.0) throw std::domain_error("type II reference at p = 0");
  if (R < s.ladder_ir) return 0.0;
  return ladder(R, s.ladder_ir);
}

double reference_type3(const ReferenceSpec& s, const Eigen::Vector3d& x) {
  double R = max_abs(x);
  if (R == 0.0) throw std::domain_error("type III reference at p = 0");
  if (R < s.k_star) return ladder(R, s.ladder_ir);
  return s.d * std::exp(-s.gamma * x.lpNorm<1>());
}

double reference_value(const ReferenceSpec& s, const Eigen::Vector3d& x) {
  switch (s.family) {
    case Family::Type1: return reference_type1(s, x);
    case Family::Type2: return reference_type2(s, x);
    case Family::Type3: return reference_type3(s, x);
    case Family::Qho: break;
  }
  throw std::invalid_argument("QHO references are one-dimensional");
}

double local_plateau(int s) {
  if (s < 0) throw std::invalid_argument("local plateau defined for s >= 0");
  return s == 0 ? 1.0 : std::pow(2.0 * s / M_E, 0.5 * s);
}

double local_target(int s, double x) { return std::exp(-0.25 * x * x) * std::pow(x, s); }

int rounds_for(double p, bool* flagged) {
  int r = p >= 0.25 ? 1 : p >= 0.095 ? 2 : p >= 0.05 ? 3 : 0;
  if (flagged) *flagged = r == 0;
  return r;
}

DominationError::DominationError(const IVec3& at, double ps, std::int64_t nv)
    : std::runtime_error("reference does not dominate target at p = (" + std::to_string(at[0]) + ", " +
                         std::to_string(at[1]) + ", " + std::to_string(at[2]) + "); " + std::to_string(nv) +
                         " violating points, p_succ = " + std::to_string(ps)),
      p(at),
      p_succ(ps),
      violations(nv) {}

SuccessReport success_probability(const PointFn& target, const PointFn& reference, const IVec3& m,
                                  const Eigen::Matrix3d& b, bool skip_zero, DominationMode mode, Exec exec) {
  struct Slab {
    double num = 0.0, den = 0.0;
    std::int64_t viol = 0, pts = 0;
    std::optional<IVec3> first;
  };
  const int nslab = 2 * m[0] + 1;
  std::vector<Slab> slabs(nslab);
  const Eigen::Vector3d b1 = b.row(0).transpose(), b2 = b.row(1).transpose(), b3 = b.row(2).transpose();
  auto run = [&](int s) {
    Slab& sl = slabs[s];
    int p1 = s - m[0];
    for (int p2 = -m[1]; p2 <= m[1]; ++p2)
      for (int p3 = -m[2]; p3 <= m[2]; ++p3) {
        if (skip_zero && p1 == 0 && p2 == 0 && p3 == 0) continue;
        Eigen::Vector3d k = p1 * b1 + p2 * b2 + p3 * b3;
        double t = std::abs(target(k));
        double r = reference(k);
        sl.num += t * t;
        sl.den += r * r;
        ++sl.pts;
        if (r < t * (1.0 - 1e-12)) {
          if (!sl.first) sl.first = IVec3{p1, p2, p3};
          ++sl.viol;
        }
      }
  };
  if (exec == Exec::Serial) {
    for (int s = 0; s < nslab; ++s) run(s);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < nslab; ++s) run(s);
  }
  SuccessReport rep;
  double num = 0.0, den = 0.0;
  for (const auto& sl : slabs) {
    num += sl.num;
    den += sl.den;
    rep.violations += sl.viol;
    rep.points += sl.pts;
    if (!rep.first_violation && sl.first) rep.first_violation = sl.first;
  }
  if (!(den > 0.0)) throw std::domain_error("reference vanishes on the whole basis");
  rep.p_succ = num / den;
  rep.rounds = rounds_for(rep.p_succ, &rep.flagged);
  if (mode == DominationMode::Strict && rep.violations > 0)
    throw DominationError(*rep.first_violation, rep.p_succ, rep.violations);
  return rep;
}

double infrared_cutoff(const IVec3& m, const Eigen::Matrix3d& b) {
  double best = std::numeric_limits<double>::infinity();
  // Assumes a reduced cell: the shortest vector has all |p_a| <= 2.
  int r[3];
  for (int a = 0; a < 3; ++a) r[a] = std::min(m[a], 2);
  for (int i = -r[0]; i <= r[0]; ++i)
    for (int j = -r[1]; j <= r[1]; ++j)
      for (int k = -r[2]; k <= r[2]; ++k)
        if (i || j || k) best = std::min(best, std::sqrt(ksq({i, j, k}, b)));
  return best;
}

SuccessReport coulomb_type2_success(const BasisSpec& basis, bool exchange_set, DominationMode mode) {
  IVec3 m = basis.p_max;
  if (exchange_set)
    for (auto& v : m) v *= 2;
  auto spec = type2_spec(infrared_cutoff(m, basis.b));
  return success_probability([](const Eigen::Vector3d& k) { return 1.0 / k.norm(); },
                             [&](const Eigen::Vector3d& k) { return reference_type2(spec, k); }, m, basis.b, true,
                             mode);
}

SuccessReport local_type1_success(int s, double r_loc, const BasisSpec& electron, const ReferenceTable& t,
                                  DominationMode mode) {
  if (s < 0 || s > 3) throw std::invalid_argument("type I local reference needs s in 0..3");
  auto spec = type1_spec(t.local[s + 1], local_plateau(s));
  IVec3 m{2 * electron.p_max[0], 2 * electron.p_max[1], 2 * electron.p_max[2]};
  return success_probability([&](const Eigen::Vector3d& k) { return local_target(s, k.norm() * r_loc); },
                             [&](const Eigen::Vector3d& k) { return reference_type1(spec, k * r_loc); }, m,
                             electron.b, true, mode);
}

SuccessReport local_type3_success(double r_loc, const BasisSpec& electron, const ReferenceTable& t,
                                  DominationMode mode) {
  auto spec = type3_spec(t.local[0]);
  IVec3 m{2 * electron.p_max[0], 2 * electron.p_max[1], 2 * electron.p_max[2]};
  return success_probability(
      [&](const Eigen::Vector3d& k) {
        double x = k.norm() * r_loc;
        return std::exp(-0.25 * x * x) / x;
      },
      [&](const Eigen::Vector3d& k) { return reference_type3(spec, k * r_loc); }, m, electron.b, true, mode);
}

double nonlocal_plateau(const NonlocalEigen& e, int alpha, const BasisSpec& electron) {
  const int nslab = 2 * electron.p_max[0] + 1;
  std::vector<double> best(nslab, 0.0);
  const Eigen::Matrix3d& b = electron.b;
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < nslab; ++s) {
    int p1 = s - electron.p_max[0];
    double m = 0.0;
    for (int p2 = -electron.p_max[1]; p2 <= electron.p_max[1]; ++p2)
      for (int p3 = -electron.p_max[2]; p3 <= electron.p_max[2]; ++p3) {
        Eigen::Vector3d k = p1 * b.row(0) + p2 * b.row(1) + p3 * b.row(2);
        m = std::max(m, std::abs(G_alpha(e, alpha, k.norm() * e.r)));
      }
    best[s] = m;
  }
  return *std::max_element(best.begin(), best.end());
}

SuccessReport nonlocal_type1_success(const PseudoIonParams& p, int l, int alpha, const BasisSpec& electron,
                                     const ReferenceTable& t, DominationMode mode) {
  const ProjectorBlock* blk = p.block(l);
  if (!blk) throw std::invalid_argument(p.label + " has no projector with l=" + std::to_string(l));
  if (alpha < 0 || alpha >= blk->dim) throw std::invalid_argument("projector index out of range");
  auto e = nonlocal_eigen(*blk);
  auto spec = type1_spec(t.nonlocal_row(p.label, l, alpha), nonlocal_plateau(e, alpha, electron));
  return success_probability([&](const Eigen::Vector3d& k) { return G_alpha(e, alpha, k.norm() * e.r); },
                             [&](const Eigen::Vector3d& k) { return reference_type1(spec, k * e.r); },
                             electron.p_max, electron.b, false, mode);
}

double qho_target(int level, double q) {
  return std::exp(-0.5 * q * q) * std::hermite(static_cast<unsigned>(level), q);
}

double qho_reference_value(const QhoResult& r, double q) {
  if (std::abs(q) <= r.q_star) return r.plateau;
  return r.d * std::exp(-r.gamma * std::abs(q));
}

QhoResult qho_reference(int level, const QhoOptions& opt) {
  if (level < 0 || level > opt.max_level)
    throw std::invalid_argument("QHO level outside 0.." + std::to_string(opt.max_level));
  if (opt.grid_points < 2) throw std::invalid_argument("QHO grid needs at least two points");
  QhoResult r;
  r.level = level;
  const auto n = static_cast<unsigned>(level);
  if (level == 0 && opt.literal_ground_constants) {
    r.q_star = 1.0;
    r.gamma = -0.5;
    r.d = std::pow(M_PI, -0.25);
  } else {
    double qs = std::sqrt(2.0 * level + 1.0);
    double H = std::hermite(n, qs);
    double dH = level > 0 ? 2.0 * level * std::hermite(n - 1, qs) : 0.0;
    double phi = std::exp(-0.5 * qs * qs) * H;
    double dphi = std::exp(-0.5 * qs * qs) * (dH - qs * H);
    r.q_star = qs;
    r.gamma = -dphi / phi;
    r.d = std::exp(r.gamma * qs) * std::abs(phi);
  }
  const double span = std::sqrt(2.0 * level + 1.0) + opt.span_pad;
  const int N = opt.grid_points;
  std::vector<double> q(N), t(N);
  for (int i = 0; i < N; ++i) {
    q[i] = -span + 2.0 * span * i / (N - 1);
    t[i] = std::abs(qho_target(level, q[i]));
    if (std::abs(q[i]) <= r.q_star) r.plateau = std::max(r.plateau, t[i]);
  }
  double num = 0.0, den = 0.0;
  std::optional<int> first;
  for (int i = 0; i < N; ++i) {
    double ref = qho_reference_value(r, q[i]);
    num += t[i] * t[i];
    den += ref * ref;
    if (ref < t[i] - 1e-12 * r.plateau) {
      ++r.violations;
      if (!first) first = i;
    }
  }
  r.p_succ = num / den;
  r.rounds = rounds_for(r.p_succ);
  if (opt.mode == DominationMode::Strict && r.violations > 0)
    throw DominationError({*first, 0, 0}, r.p_succ, r.violations);
  return r;
}

}  // namespace qdyn
