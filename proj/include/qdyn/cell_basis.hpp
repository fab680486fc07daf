#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace qdyn {

using IVec3 = std::array<int, 3>;

struct SimulationCell {
  // Rows are the lattice vectors a_1..a_3 in Bohr.
  Eigen::Matrix3d A = Eigen::Matrix3d::Identity();
  std::string shape_tag = "general";

  double volume() const;
};

SimulationCell cuboid_cell(double a1, double a2, double a3);
SimulationCell rhombohedral120_cell(double a1, double a2, double a3);

enum class BasisRole { Electron, Ion, IonTrunc };

std::string to_string(BasisRole r);
BasisRole basis_role_from_string(const std::string& s);

struct BasisSpec {
  IVec3 p_max{};
  IVec3 n{};  // qubits per axis; zero for IonTrunc
  std::array<double, 3> true_cutoffs{};
  Eigen::Matrix3d b = Eigen::Matrix3d::Zero();  // rows are b_1..b_3
  BasisRole role = BasisRole::Electron;

  Eigen::Matrix3d gram() const { return b * b.transpose(); }
  double volume = 0.0;  // real-space cell volume
};

// Rows b_alpha with b_alpha . a_beta = 2 pi delta.
Eigen::Matrix3d reciprocal_vectors(const SimulationCell& cell);

BasisSpec build_basis(const SimulationCell& cell, const std::array<double, 3>& lambda, BasisRole role,
                      double kappa = 1.5);
BasisSpec build_basis(const SimulationCell& cell, double lambda, BasisRole role, double kappa = 1.5);
// Truncated ion exchange basis from explicit per-axis p_max.
BasisSpec trunc_basis_from_pmax(const SimulationCell& cell, const IVec3& p_max);

std::int64_t basis_size(const BasisSpec& spec);
// Size of the momentum-exchange set: box [-2p, 2p] minus the origin.
std::int64_t exchange_set_size(const IVec3& p_max);

double ksq(const IVec3& p, const Eigen::Matrix3d& b);

// Largest |k|^2 over the box [-m, m]; attained at one of the 8 corners.
double max_ksq_box(const IVec3& m, const Eigen::Matrix3d& b);

int n_total(const BasisSpec& spec);

}  // namespace qdyn
