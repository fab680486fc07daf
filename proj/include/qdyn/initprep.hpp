#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qdyn/cell_basis.hpp"

namespace qdyn {

enum class Topology { Nonlinear, Linear, Substrate, Atom };
std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);

// Number of Euclidean generators removed: 6, 5, 3, 3.
int symmetry_generator_count(Topology t);

struct MolecularGeometry {
  std::vector<double> masses;              // electron masses
  std::vector<Eigen::Vector3d> positions;  // Bohr
  Topology topology = Topology::Nonlinear;

  int atoms() const { return static_cast<int>(masses.size()); }
  Eigen::Vector3d center_of_mass() const;
  void validate() const;
};

// Shape-space dimension: 3N-6, 3N-5, 3N-3, 0.
int mode_count(const MolecularGeometry& g);

struct NormalModes {
  Eigen::VectorXd frequencies;  // ascending, a.u.
  Eigen::VectorXd force_constants;
  Eigen::MatrixXd vectors;  // 3N x modes, mass-weighted, orthonormal columns
  // |F~ t| for each orthonormalised generator, relative to the largest reduced eigenvalue.
  Eigen::VectorXd zero_residuals;
};

struct NotAMinimumError : std::runtime_error {
  double eigenvalue;
  explicit NotAMinimumError(double ev);
};

// Hessian in Hartree/Bohr^2, row-major over (atom, axis).
NormalModes normal_modes(const MolecularGeometry& g, const Eigen::MatrixXd& hessian, std::uint64_t seed = 1);

double hartree_to_wavenumber(double omega);

struct GeometryHessian {
  MolecularGeometry geometry;
  Eigen::MatrixXd hessian;
};

// Text: "N topology", N lines "mass x y z", then 3N Hessian rows. '#' starts a comment.
GeometryHessian parse_geometry_hessian(const std::string& text);
GeometryHessian load_geometry_hessian(const std::string& path);

// Cumulative: ceil(ln(1/eps) / (beta w)), so Pr(l >= l_max) <= eps.
// PerLevel: ceil((1/(beta w)) ln((1/eps)(1 - e^{-beta w}))), so Pr(l) <= eps for l >= l_max.
// Both are clamped at 0.
enum class TailRule { Cumulative, PerLevel };
int thermal_cutoff(double omega, double beta, double eps, TailRule rule = TailRule::Cumulative);

struct ThermalVibSpec {
  double omega = 0.0;
  double beta = 0.0;
  int l_max = 0;
  double z_vib = 0.0;
  std::vector<double> weights;  // Pr(l), l = 0..l_max, normalized
};

ThermalVibSpec vib_weights(double omega, double beta, int l_max);

struct EckartReport {
  Eigen::Vector3d residual = Eigen::Vector3d::Zero();
  Eigen::Vector3d moments = Eigen::Vector3d::Zero();  // ascending
  Eigen::Matrix3d axes = Eigen::Matrix3d::Identity();  // columns
  Eigen::Vector3d mu = Eigen::Vector3d::Zero();       // inverse moments; +inf where degenerate
  bool degenerate = false;
};

// Residual sum_I R_I x R0_I (times M_I when mass_weighted); inertia of R0 about its center of mass.
EckartReport eckart_inertia(const MolecularGeometry& g, const std::vector<Eigen::Vector3d>& displaced,
                            bool mass_weighted = false);

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Injective assignment of points to sites p in [-m, m], x(p) = sum_a p_a steps.row(a). Each point is
// rounded to its nearest site; on a clash, shells of growing Chebyshev radius are searched and the
// nearest free site taken (ties: lexicographically smallest p). Input order decides precedence.
std::vector<IVec3> grid_match(const std::vector<Eigen::Vector3d>& points, const Eigen::Matrix3d& steps,
                              const IVec3& m);
std::vector<IVec3> grid_match(const std::vector<Eigen::Vector3d>& points, const BasisSpec& lattice);

struct WavepacketInput {
  Eigen::Vector3d R_bar = Eigen::Vector3d::Zero();  // Bohr, cell frame
  Eigen::Vector3d P_bar = Eigen::Vector3d::Zero();
  double sigma = 1.0;
  Eigen::Vector3d cell_lengths = Eigen::Vector3d::Ones();
  int n_trans = 4;  // qubits per axis
  int n_rot = 1;    // qubits per angle
  bool linear = false;
};

struct WavepacketParams {
  WavepacketInput input;
  Eigen::Vector3d axis_norm = Eigen::Vector3d::Zero();  // per-axis normalisation constants
  double norm_constant = 0.0;
  int angles = 3;
  std::int64_t rot_points = 0;
  double rot_amplitude = 0.0;
  double n_rot_norm = 0.0;  // 2^{angles n_rot / 2}
};

WavepacketParams wavepacket_params(const WavepacketInput& in);

// Amplitude at grid index j along axis a, using the normalisation of p.
std::complex<double> wavepacket_amplitude(const WavepacketParams& p, int axis, std::int64_t j);

}  // namespace qdyn
