#include "qdyn/cell_basis.hpp"

#include <cmath>
#include <stdexcept>

namespace qdyn {

double SimulationCell::volume() const { return std::abs(A.row(0).dot(A.row(1).cross(A.row(2)))); }

SimulationCell cuboid_cell(double a1, double a2, double a3) {
  SimulationCell c;
  c.A = Eigen::Vector3d(a1, a2, a3).asDiagonal();
  c.shape_tag = "cuboid";
  return c;
}

SimulationCell rhombohedral120_cell(double a1, double a2, double a3) {
  SimulationCell c;
  c.A << a1, 0, 0, -0.5 * a2, std::sqrt(3.0) / 2 * a2, 0, 0, 0, a3;
  c.shape_tag = "rhombohedron-120";
  return c;
}

std::string to_string(BasisRole r) {
  switch (r) {
    case BasisRole::Electron: return "electron";
    case BasisRole::Ion: return "ion";
    case BasisRole::IonTrunc: return "ion-trunc";
  }
  return "?";
}

BasisRole basis_role_from_string(const std::string& s) {
  if (s == "electron") return BasisRole::Electron;
  if (s == "ion") return BasisRole::Ion;
  if (s == "ion-trunc") return BasisRole::IonTrunc;
  throw std::invalid_argument("unknown basis role " + s);
}

Eigen::Matrix3d reciprocal_vectors(const SimulationCell& cell) {
  double omega = cell.volume();
  double scale = std::max({cell.A.row(0).norm(), cell.A.row(1).norm(), cell.A.row(2).norm()});
  if (!(omega > 1e-12 * scale * scale * scale)) throw std::invalid_argument("degenerate simulation cell");
  Eigen::Matrix3d B;
  double s = 2 * M_PI / cell.A.row(0).dot(cell.A.row(1).cross(cell.A.row(2)));
  B.row(0) = s * cell.A.row(1).cross(cell.A.row(2));
  B.row(1) = s * cell.A.row(2).cross(cell.A.row(0));
  B.row(2) = s * cell.A.row(0).cross(cell.A.row(1));
  return B;
}

BasisSpec build_basis(const SimulationCell& cell, const std::array<double, 3>& lambda, BasisRole role,
                      double kappa) {
  BasisSpec spec;
  spec.b = reciprocal_vectors(cell);
  spec.role = role;
  spec.volume = cell.volume();
  for (int a = 0; a < 3; ++a) {
    double bn = spec.b.row(a).norm();
    if (!(lambda[a] > 0.0)) throw std::invalid_argument("cutoff must be positive");
    if (role == BasisRole::IonTrunc) {
      spec.p_max[a] = static_cast<int>(std::lround(lambda[a] * kappa / bn));
      if (spec.p_max[a] < 1) throw std::invalid_argument("truncated ion basis is empty");
      spec.n[a] = 0;
    } else {
      if (lambda[a] < bn) throw std::invalid_argument("cutoff below smallest reciprocal spacing");
      double p = lambda[a] / bn;
      spec.n[a] = static_cast<int>(std::ceil(std::log2(p + 1.0))) + 1;
      spec.p_max[a] = (1 << (spec.n[a] - 1)) - 1;
    }
    spec.true_cutoffs[a] = spec.p_max[a] * bn;
  }
  return spec;
}

BasisSpec build_basis(const SimulationCell& cell, double lambda, BasisRole role, double kappa) {
  return build_basis(cell, {lambda, lambda, lambda}, role, kappa);
}

BasisSpec trunc_basis_from_pmax(const SimulationCell& cell, const IVec3& p_max) {
  BasisSpec spec;
  spec.b = reciprocal_vectors(cell);
  spec.role = BasisRole::IonTrunc;
  spec.volume = cell.volume();
  spec.p_max = p_max;
  for (int a = 0; a < 3; ++a) {
    if (p_max[a] < 1) throw std::invalid_argument("truncated ion basis is empty");
    spec.true_cutoffs[a] = p_max[a] * spec.b.row(a).norm();
  }
  return spec;
}

std::int64_t basis_size(const BasisSpec& spec) {
  std::int64_t s = 1;
  for (int a = 0; a < 3; ++a) s *= 2 * static_cast<std::int64_t>(spec.p_max[a]) + 1;
  return s;
}

std::int64_t exchange_set_size(const IVec3& p_max) {
  std::int64_t s = 1;
  for (int a = 0; a < 3; ++a) s *= 4 * static_cast<std::int64_t>(p_max[a]) + 1;
  return s - 1;
}

double ksq(const IVec3& p, const Eigen::Matrix3d& b) {
  Eigen::Vector3d v(p[0], p[1], p[2]);
  return v.dot(b * b.transpose() * v);
}

double max_ksq_box(const IVec3& m, const Eigen::Matrix3d& b) {
  double best = 0.0;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1}) best = std::max(best, ksq({sx * m[0], sy * m[1], sz * m[2]}, b));
  return best;
}

int n_total(const BasisSpec& spec) { return spec.n[0] + spec.n[1] + spec.n[2]; }

}  // namespace qdyn
