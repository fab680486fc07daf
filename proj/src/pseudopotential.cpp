#include "qdyn/pseudopotential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace qdyn {

const ProjectorBlock* PseudoIonParams::block(int l) const {
  for (const auto& b : blocks)
    if (b.l == l) return &b;
  return nullptr;
}

int PseudoIonParams::l_max() const { return blocks.empty() ? -1 : blocks.back().l; }

void validate(const PseudoIonParams& p) {
  if (p.Z_pi < 1 || p.Z_pi > p.Z_full) throw std::invalid_argument(p.label + ": Z_pi outside [1, Z_full]");
  if (!(p.mass > 1000.0)) throw std::invalid_argument(p.label + ": mass must exceed 1000");
  if (!(p.r_loc > 0.0)) throw std::invalid_argument(p.label + ": r_loc must be positive");
  for (const auto& b : p.blocks) {
    if (!(b.r > 0.0)) throw std::invalid_argument(p.label + ": r_l must be positive");
    double scale = std::max(1.0, b.B.cwiseAbs().maxCoeff());
    if ((b.B - b.B.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw std::invalid_argument(p.label + ": B_l not symmetric");
  }
}

namespace {

struct Line {
  int no;
  std::vector<std::string> tok;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int no = 0;
  while (std::getline(in, raw)) {
    ++no;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    std::istringstream ls(raw);
    Line L{no, {}};
    std::string t;
    while (ls >> t) L.tok.push_back(t);
    if (!L.tok.empty()) out.push_back(std::move(L));
  }
  return out;
}

double to_real(const Line& L, std::size_t i) {
  if (i >= L.tok.size()) throw ParseError(L.no, "missing numeric field");
  const std::string& s = L.tok[i];
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError(L.no, "malformed number '" + s + "'");
  }
  if (used != s.size()) throw ParseError(L.no, "malformed number '" + s + "'");
  return v;
}

int to_int(const Line& L, std::size_t i) {
  double v = to_real(L, i);
  if (v != std::floor(v)) throw ParseError(L.no, "expected integer '" + L.tok[i] + "'");
  return static_cast<int>(v);
}

bool is_number(const std::string& s) {
  std::size_t used = 0;
  try {
    std::stod(s, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == s.size();
}

// Header lines are the only ones whose first token is not numeric.
bool is_header(const Line& L) { return !is_number(L.tok[0]); }

}  // namespace

std::vector<PseudoIonParams> parse_hgh(std::string_view text) {
  auto lines = tokenize(text);
  std::vector<PseudoIonParams> out;
  std::map<std::string, int> seen;
  std::size_t i = 0;
  while (i < lines.size()) {
    const Line& H = lines[i];
    if (!is_header(H)) throw ParseError(H.no, "expected record header 'label Z_full Z_pi mass'");
    if (H.tok.size() != 4) throw ParseError(H.no, "record header needs 4 fields");
    PseudoIonParams p;
    p.label = H.tok[0];
    p.Z_full = to_int(H, 1);
    p.Z_pi = to_int(H, 2);
    p.mass = to_real(H, 3);
    if (seen.count(p.label)) throw ParseError(H.no, "duplicate label " + p.label);
    seen[p.label] = H.no;
    ++i;
    if (i >= lines.size() || is_header(lines[i])) throw ParseError(H.no, "missing r_loc line");
    const Line& R = lines[i];
    if (R.tok.size() > 5) throw ParseError(R.no, "too many local coefficients");
    p.r_loc = to_real(R, 0);
    if (!(p.r_loc > 0.0)) throw ParseError(R.no, "r_loc must be positive");
    for (std::size_t c = 1; c < R.tok.size(); ++c) p.C[c - 1] = to_real(R, c);
    ++i;
    while (i < lines.size() && !is_header(lines[i])) {
      const Line& Bh = lines[i];
      if (Bh.tok.size() != 2) throw ParseError(Bh.no, "projector header needs 'l r_l'");
      ProjectorBlock b;
      b.l = to_int(Bh, 0);
      b.r = to_real(Bh, 1);
      if (b.l < 0 || b.l > 2) throw ParseError(Bh.no, "l must be 0, 1 or 2");
      if (!(b.r > 0.0)) throw ParseError(Bh.no, "r_l must be positive");
      if (p.block(b.l)) throw ParseError(Bh.no, "duplicate l block");
      ++i;
      // Upper-triangle rows have strictly decreasing lengths n, n-1, ..., 1.
      if (i >= lines.size() || is_header(lines[i])) throw ParseError(Bh.no, "missing B rows");
      int n = static_cast<int>(lines[i].tok.size());
      if (n < 1 || n > 3) throw ParseError(lines[i].no, "B row must have 1 to 3 entries");
      b.dim = n;
      for (int a = 0; a < n; ++a, ++i) {
        if (i >= lines.size() || is_header(lines[i]))
          throw ParseError(Bh.no, "truncated B upper triangle");
        const Line& row = lines[i];
        if (static_cast<int>(row.tok.size()) != n - a)
          throw ParseError(row.no, "B upper-triangle row has wrong length");
        for (int c = a; c < n; ++c) {
          double v = to_real(row, c - a);
          b.B(a, c) = v;
          b.B(c, a) = v;
        }
      }
      p.blocks.push_back(b);
    }
    std::sort(p.blocks.begin(), p.blocks.end(),
              [](const ProjectorBlock& x, const ProjectorBlock& y) { return x.l < y.l; });
    try {
      validate(p);
    } catch (const std::invalid_argument& e) {
      throw ParseError(H.no, e.what());
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string serialize_hgh(const std::vector<PseudoIonParams>& records) {
  std::ostringstream o;
  o << std::setprecision(17);
  for (const auto& p : records) {
    o << p.label << ' ' << p.Z_full << ' ' << p.Z_pi << ' ' << p.mass << '\n';
    o << p.r_loc;
    for (double c : p.C) o << ' ' << c;
    o << '\n';
    for (const auto& b : p.blocks) {
      o << b.l << ' ' << b.r << '\n';
      for (int a = 0; a < b.dim; ++a) {
        for (int c = a; c < b.dim; ++c) o << (c > a ? " " : "") << b.B(a, c);
        o << '\n';
      }
    }
    o << '\n';
  }
  return o.str();
}

std::vector<PseudoIonParams> load_hgh_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open HGH file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_hgh(ss.str());
}

std::string default_hgh_path() { return std::string(QDYN_DATA_DIR) + "/hgh_lda.txt"; }

const PseudoIonParams& find_species(const std::vector<PseudoIonParams>& table,
                                    const std::string& label) {
  for (const auto& p : table)
    if (p.label == label) return p;
  throw std::invalid_argument("unknown species label " + label);
}

LocalCoeffs local_coeffs(const PseudoIonParams& p) {
  const auto& C = p.C;
  return {-std::sqrt(2.0 / M_PI) * p.Z_pi / p.r_loc,
          C[0] + 3 * C[1] + 15 * C[2] + 105 * C[3],
          -C[1] - 10 * C[2] - 105 * C[3],
          C[2] + 21 * C[3],
          -C[3]};
}

namespace {

// Generalized Laguerre L_n^alpha(y) for n <= 2.
double laguerre(int n, double alpha, double y) {
  switch (n) {
    case 0: return 1.0;
    case 1: return 1.0 + alpha - y;
    case 2: return 0.5 * (alpha + 1) * (alpha + 2) - (alpha + 2) * y + 0.5 * y * y;
  }
  throw std::invalid_argument("laguerre degree above 2");
}

}  // namespace

double g_radial(int a, int l, double x) {
  if (a < 1 || a > 3 || l < 0 || l > 2) throw std::invalid_argument("g_radial index out of range");
  static const auto norm = [] {
    std::array<std::array<double, 3>, 3> A{};
    const double fact[3] = {1.0, 1.0, 2.0};
    for (int aa = 1; aa <= 3; ++aa)
      for (int ll = 0; ll <= 2; ++ll)
        A[aa - 1][ll] = std::sqrt(M_PI) * std::ldexp(1.0, aa - 1) * fact[aa - 1] / std::sqrt(std::tgamma(ll + 2 * aa - 0.5));
    return A;
  }();
  double y = 0.5 * x * x;
  double xl = l == 0 ? 1.0 : (l == 1 ? x : x * x);
  return std::exp(-y) * xl * norm[a - 1][l] * laguerre(a - 1, l + 0.5, y);
}

NonlocalEigen nonlocal_eigen(const ProjectorBlock& block) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(block.B);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  NonlocalEigen e;
  e.l = block.l;
  e.r = block.r;
  e.D = es.eigenvalues();
  e.X = es.eigenvectors();
  return e;
}

std::vector<NonlocalEigen> nonlocal_eigen(const PseudoIonParams& p) {
  std::vector<NonlocalEigen> out;
  for (const auto& b : p.blocks) out.push_back(nonlocal_eigen(b));
  return out;
}

double G_alpha(const NonlocalEigen& e, int alpha, double x) {
  double s = 0.0;
  for (int b = 0; b < 3; ++b) {
    double w = e.X(b, alpha);
    if (w != 0.0) s += w * g_radial(b + 1, e.l, x);
  }
  return s;
}

double G_alpha(const PseudoIonParams& p, int l, int alpha, double x) {
  const ProjectorBlock* b = p.block(l);
  if (!b) throw std::invalid_argument(p.label + " has no l=" + std::to_string(l) + " projector");
  return G_alpha(nonlocal_eigen(*b), alpha, x);
}

double h_loc(const PseudoIonParams& p, double ksq, double omega) {
  if (!(ksq > 0.0)) throw std::domain_error("h_loc at zero momentum exchange");
  auto c = local_coeffs(p);
  double x2 = ksq * p.r_loc * p.r_loc;
  double poly = c[0] / x2;
  double xp = 1.0;
  for (int s = 0; s <= 3; ++s, xp *= x2) poly += c[s + 1] * xp;
  double pref = 4 * M_PI * std::pow(p.r_loc, 3) / omega * std::sqrt(M_PI / 2);
  return pref * std::exp(-0.5 * x2) * poly;
}

double legendre_eval(int l, double c) {
  if (std::abs(c) > 1.0 + 1e-12) throw std::domain_error("legendre argument outside [-1, 1]");
  switch (l) {
    case 0: return 1.0;
    case 1: return c;
    case 2: return 0.5 * (3 * c * c - 1);
  }
  throw std::invalid_argument("legendre order above 2");
}

double nl_bound_coefficient(const NonlocalEigen& e, int alpha, double upper) {
  auto f = [&](double x) {
    double G = G_alpha(e, alpha, x);
    return x * x * G * G;
  };
  double err = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, upper, 15, 1e-13, &err);
  if (!(err < 1e-10)) throw std::runtime_error("C-tilde quadrature did not converge");
  return 2.0 / M_PI * v;
}

}  // namespace qdyn
