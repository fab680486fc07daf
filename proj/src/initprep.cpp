#include "qdyn/initprep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

namespace qdyn {

std::string to_string(Topology t) {
  switch (t) {
    case Topology::Nonlinear: return "nonlinear";
    case Topology::Linear: return "linear";
    case Topology::Substrate: return "substrate";
    case Topology::Atom: return "atom";
  }
  return "?";
}

Topology topology_from_string(const std::string& s) {
  if (s == "nonlinear") return Topology::Nonlinear;
  if (s == "linear") return Topology::Linear;
  if (s == "substrate") return Topology::Substrate;
  if (s == "atom") return Topology::Atom;
  throw std::invalid_argument("unknown topology '" + s + "'");
}

int symmetry_generator_count(Topology t) {
  switch (t) {
    case Topology::Nonlinear: return 6;
    case Topology::Linear: return 5;
    case Topology::Substrate:
    case Topology::Atom: return 3;
  }
  return 0;
}

Eigen::Vector3d MolecularGeometry::center_of_mass() const {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  double M = 0.0;
  for (int i = 0; i < atoms(); ++i) {
    c += masses[i] * positions[i];
    M += masses[i];
  }
  return c / M;
}

void MolecularGeometry::validate() const {
  if (masses.size() != positions.size()) throw std::invalid_argument("mass and position counts differ");
  if (masses.empty()) throw std::invalid_argument("empty geometry");
  for (double m : masses)
    if (!(m > 0.0)) throw std::invalid_argument("masses must be positive");
  if (topology == Topology::Atom && atoms() != 1) throw std::invalid_argument("atom topology needs one atom");
  if (topology == Topology::Linear && atoms() < 2) throw std::invalid_argument("linear topology needs two atoms");
  if (topology == Topology::Nonlinear && atoms() < 3)
    throw std::invalid_argument("nonlinear topology needs three atoms");
}

int mode_count(const MolecularGeometry& g) {
  if (g.topology == Topology::Atom) return 0;
  return 3 * g.atoms() - symmetry_generator_count(g.topology);
}

NotAMinimumError::NotAMinimumError(double ev)
    : std::runtime_error("reduced Hessian has negative eigenvalue " + std::to_string(ev)), eigenvalue(ev) {}

namespace {

// Orthonormal basis of the span of the mass-weighted translation and rotation generators.
Eigen::MatrixXd generators(const MolecularGeometry& g) {
  const int N = g.atoms();
  const bool rotations = g.topology == Topology::Nonlinear || g.topology == Topology::Linear;
  const Eigen::Vector3d com = g.center_of_mass();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(3 * N, rotations ? 6 : 3);
  for (int i = 0; i < N; ++i) {
    double sm = std::sqrt(g.masses[i]);
    for (int a = 0; a < 3; ++a) {
      G(3 * i + a, a) = sm;
      if (rotations) G.block<3, 1>(3 * i, 3 + a) = sm * Eigen::Vector3d::Unit(a).cross(g.positions[i] - com);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int rank = 0;
  while (rank < sv.size() && sv(rank) > 1e-8 * sv(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

}  // namespace

NormalModes normal_modes(const MolecularGeometry& g, const Eigen::MatrixXd& hessian, std::uint64_t seed) {
  g.validate();
  const int N = g.atoms(), dim = 3 * N;
  if (hessian.rows() != dim || hessian.cols() != dim) throw std::invalid_argument("Hessian must be 3N x 3N");
  const double hs = std::max(1.0, hessian.cwiseAbs().maxCoeff());
  if ((hessian - hessian.transpose()).cwiseAbs().maxCoeff() > 1e-10 * hs)
    throw std::invalid_argument("Hessian is not symmetric");

  Eigen::VectorXd inv_sqrt_m(dim);
  for (int i = 0; i < N; ++i) inv_sqrt_m.segment<3>(3 * i).setConstant(1.0 / std::sqrt(g.masses[i]));
  Eigen::MatrixXd F = inv_sqrt_m.asDiagonal() * hessian * inv_sqrt_m.asDiagonal();
  F = 0.5 * (F + F.transpose());

  Eigen::MatrixXd G = generators(g);
  const int ng = static_cast<int>(G.cols());
  if (ng != symmetry_generator_count(g.topology))
    throw std::invalid_argument("geometry has " + std::to_string(ng) + " independent generators, topology '" +
                                to_string(g.topology) + "' needs " +
                                std::to_string(symmetry_generator_count(g.topology)));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd Q;
  for (int attempt = 0;; ++attempt) {
    if (attempt == 16) throw std::runtime_error("could not complete generator basis");
    Eigen::MatrixXd A(dim, dim);
    A.leftCols(ng) = G;
    for (int c = ng; c < dim; ++c)
      for (int r = 0; r < dim; ++r) A(r, c) = nd(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
    double dmax = R.diagonal().cwiseAbs().maxCoeff();
    if (R.diagonal().head(ng).cwiseAbs().minCoeff() < 1e-10 * dmax)
      throw std::invalid_argument("generator block is rank deficient");
    if (R.diagonal().cwiseAbs().minCoeff() < 1e-10 * dmax) continue;
    Q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
    break;
  }

  NormalModes out;
  const int nm = dim - ng;
  Eigen::MatrixXd Qt = Q.rightCols(nm);
  if (nm > 0) {
    Eigen::MatrixXd red = Qt.transpose() * F * Qt;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (red + red.transpose()));
    const Eigen::VectorXd& f = es.eigenvalues();
    double fscale = std::max(1.0, f.cwiseAbs().maxCoeff());
    if (f(0) < -1e-10 * fscale) throw NotAMinimumError(f(0));
    out.force_constants = f;
    out.frequencies = f.cwiseMax(0.0).cwiseSqrt();
    out.vectors = Qt * es.eigenvectors();
  } else {
    out.force_constants.resize(0);
    out.frequencies.resize(0);
    out.vectors.resize(dim, 0);
  }
  double fmax = out.force_constants.size() ? std::max(out.force_constants.cwiseAbs().maxCoeff(), 1e-300) : 1.0;
  out.zero_residuals.resize(ng);
  for (int c = 0; c < ng; ++c) out.zero_residuals(c) = (F * Q.col(c)).norm() / fmax;
  return out;
}

double hartree_to_wavenumber(double omega) { return omega * 219474.6313632; }

GeometryHessian parse_geometry_hessian(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
  }
  if (lines.empty()) throw std::invalid_argument("empty geometry file");
  GeometryHessian gh;
  std::istringstream head(lines[0]);
  int N = 0;
  std::string topo;
  if (!(head >> N >> topo) || N <= 0) throw std::invalid_argument("bad header, expected 'N topology'");
  gh.geometry.topology = topology_from_string(topo);
  if (static_cast<int>(lines.size()) != 1 + N + 3 * N)
    throw std::invalid_argument("expected " + std::to_string(1 + 4 * N) + " data lines, found " +
                                std::to_string(lines.size()));
  for (int i = 0; i < N; ++i) {
    std::istringstream ls(lines[1 + i]);
    double m, x, y, z;
    if (!(ls >> m >> x >> y >> z)) throw std::invalid_argument("bad atom line " + std::to_string(i + 1));
    gh.geometry.masses.push_back(m);
    gh.geometry.positions.emplace_back(x, y, z);
  }
  gh.hessian.resize(3 * N, 3 * N);
  for (int r = 0; r < 3 * N; ++r) {
    std::istringstream ls(lines[1 + N + r]);
    for (int c = 0; c < 3 * N; ++c)
      if (!(ls >> gh.hessian(r, c))) throw std::invalid_argument("bad Hessian row " + std::to_string(r + 1));
  }
  gh.geometry.validate();
  return gh;
}

GeometryHessian load_geometry_hessian(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_geometry_hessian(ss.str());
}

int thermal_cutoff(double omega, double beta, double eps, TailRule rule) {
  if (!(omega > 0.0 && beta > 0.0 && eps > 0.0)) throw std::invalid_argument("omega, beta, eps must be positive");
  double bw = beta * omega;
  double v = rule == TailRule::Cumulative ? -std::log(eps) / bw : std::log((1.0 / eps) * -std::expm1(-bw)) / bw;
  if (!(v > 0.0)) return 0;
  if (v > std::numeric_limits<int>::max()) throw std::overflow_error("cutoff overflows int");
  return static_cast<int>(std::ceil(v));
}

ThermalVibSpec vib_weights(double omega, double beta, int l_max) {
  if (l_max < 0) throw std::invalid_argument("l_max must be nonnegative");
  if (!(omega > 0.0 && beta > 0.0)) throw std::invalid_argument("omega and beta must be positive");
  ThermalVibSpec s;
  s.omega = omega;
  s.beta = beta;
  s.l_max = l_max;
  s.weights.resize(l_max + 1);
  for (int l = 0; l <= l_max; ++l) {
    s.weights[l] = std::exp(-beta * omega * (l + 0.5));
    s.z_vib += s.weights[l];
  }
  for (auto& w : s.weights) w /= s.z_vib;
  return s;
}

EckartReport eckart_inertia(const MolecularGeometry& g, const std::vector<Eigen::Vector3d>& displaced,
                            bool mass_weighted) {
  g.validate();
  if (displaced.size() != g.positions.size()) throw std::invalid_argument("displaced geometry has wrong length");
  EckartReport r;
  for (int i = 0; i < g.atoms(); ++i)
    r.residual += (mass_weighted ? g.masses[i] : 1.0) * displaced[i].cross(g.positions[i]);
  Eigen::Vector3d com = g.center_of_mass();
  Eigen::Matrix3d I = Eigen::Matrix3d::Zero();
  for (int i = 0; i < g.atoms(); ++i) {
    Eigen::Vector3d x = g.positions[i] - com;
    I += g.masses[i] * (x.squaredNorm() * Eigen::Matrix3d::Identity() - x * x.transpose());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(I);
  r.moments = es.eigenvalues();
  r.axes = es.eigenvectors();
  double top = std::max(r.moments(2), 0.0);
  for (int a = 0; a < 3; ++a) {
    if (r.moments(a) <= 1e-10 * top) {
      r.degenerate = true;
      r.mu(a) = std::numeric_limits<double>::infinity();
    } else {
      r.mu(a) = 1.0 / r.moments(a);
    }
  }
  return r;
}

std::vector<IVec3> grid_match(const std::vector<Eigen::Vector3d>& points, const Eigen::Matrix3d& steps,
                              const IVec3& m) {
  for (int a = 0; a < 3; ++a)
    if (m[a] < 0) throw std::invalid_argument("negative lattice extent");
  std::int64_t sites = 1;
  for (int a = 0; a < 3; ++a) sites *= 2 * m[a] + 1;
  if (static_cast<std::int64_t>(points.size()) > sites)
    throw CapacityError(std::to_string(points.size()) + " points exceed " + std::to_string(sites) + " lattice sites");
  const Eigen::Matrix3d S = steps.transpose();  // columns are steps
  const Eigen::Matrix3d Sinv = S.inverse();
  auto site = [&](const IVec3& p) -> Eigen::Vector3d { return S * Eigen::Vector3d(p[0], p[1], p[2]); };
  std::set<IVec3> used;
  std::vector<IVec3> out;
  out.reserve(points.size());
  const int rmax = std::max({2 * m[0], 2 * m[1], 2 * m[2]});
  for (const auto& x : points) {
    Eigen::Vector3d c = Sinv * x;
    IVec3 p0;
    for (int a = 0; a < 3; ++a) p0[a] = std::clamp(static_cast<int>(std::lround(c(a))), -m[a], m[a]);
    if (!used.count(p0)) {
      used.insert(p0);
      out.push_back(p0);
      continue;
    }
    bool found = false;
    for (int r = 1; r <= rmax && !found; ++r) {
      double best = std::numeric_limits<double>::infinity();
      IVec3 pick{};
      for (int i = -r; i <= r; ++i)
        for (int j = -r; j <= r; ++j)
          for (int k = -r; k <= r; ++k) {
            if (std::max({std::abs(i), std::abs(j), std::abs(k)}) != r) continue;
            IVec3 p{p0[0] + i, p0[1] + j, p0[2] + k};
            bool inside = true;
            for (int a = 0; a < 3; ++a) inside = inside && std::abs(p[a]) <= m[a];
            if (!inside || used.count(p)) continue;
            double d = (site(p) - x).squaredNorm();
            if (d < best || (d == best && p < pick)) {
              best = d;
              pick = p;
              found = true;
            }
          }
      if (found) {
        used.insert(pick);
        out.push_back(pick);
      }
    }
    if (!found) throw CapacityError("no free lattice site");
  }
  return out;
}

std::vector<IVec3> grid_match(const std::vector<Eigen::Vector3d>& points, const BasisSpec& lattice) {
  return grid_match(points, lattice.b, lattice.p_max);
}

WavepacketParams wavepacket_params(const WavepacketInput& in) {
  if (!(in.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (in.n_trans < 1 || in.n_trans > 30 || in.n_rot < 1 || in.n_rot > 20)
    throw std::invalid_argument("register widths out of range");
  for (int a = 0; a < 3; ++a)
    if (!(in.cell_lengths(a) > 0.0)) throw std::invalid_argument("cell lengths must be positive");
  WavepacketParams p;
  p.input = in;
  const std::int64_t N = std::int64_t{1} << in.n_trans;
  p.norm_constant = 1.0;
  for (int a = 0; a < 3; ++a) {
    double h = in.cell_lengths(a) / static_cast<double>(N);
    double s = 0.0;
    for (std::int64_t j = 0; j < N; ++j) {
      double d = j * h - in.R_bar(a);
      s += std::exp(-d * d / (2 * in.sigma * in.sigma));
    }
    if (!(s > 0.0)) throw std::domain_error("wavepacket vanishes on the grid");
    p.axis_norm(a) = 1.0 / std::sqrt(s);
    p.norm_constant *= p.axis_norm(a);
  }
  p.angles = in.linear ? 2 : 3;
  p.rot_points = std::int64_t{1} << (p.angles * in.n_rot);
  p.n_rot_norm = std::exp2(0.5 * p.angles * in.n_rot);
  p.rot_amplitude = 1.0 / p.n_rot_norm;
  return p;
}

std::complex<double> wavepacket_amplitude(const WavepacketParams& p, int axis, std::int64_t j) {
  const auto& in = p.input;
  double h = in.cell_lengths(axis) / static_cast<double>(std::int64_t{1} << in.n_trans);
  double x = j * h, d = x - in.R_bar(axis);
  return p.axis_norm(axis) * std::exp(-d * d / (4 * in.sigma * in.sigma)) * std::polar(1.0, in.P_bar(axis) * x);
}

}  // namespace qdyn
