#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "qdyn/cell_basis.hpp"
#include "qdyn/lattice_sum.hpp"
#include "qdyn/pseudopotential.hpp"

namespace qdyn {

// One row of the reference-parameter table, in units of the radius rbar:
//   kstar_coef = k* / ((pi/6)^{1/3} rbar), gamma_coef = sqrt(3) rbar gamma, d.
struct TypeIRow {
  double kstar_coef = 1.0;
  double gamma_coef = 1.0;
  double d = 1.0;
};

struct ReferenceTable {
  std::array<TypeIRow, 3> nonlocal{};  // by l
  std::array<TypeIRow, 5> local{};     // by s + 1, s = -1..3
  std::map<std::tuple<std::string, int, int>, TypeIRow> overrides;  // (label, l, alpha)

  TypeIRow nonlocal_row(const std::string& label, int l, int alpha) const;
};

ReferenceTable load_reference_table(const std::string& path);
std::string default_reference_table_path();

enum class Family { Type1, Type2, Type3, Qho };
std::string to_string(Family f);

// Reference evaluated in dimensionless coordinates x = k * rbar.
struct ReferenceSpec {
  Family family = Family::Type1;
  double k_star = 0.0;  // half-width of the inner box in x
  double gamma = 0.0;   // tail decay per unit of ||x||_1
  double d = 0.0;
  double plateau = 0.0;
  double ladder_ir = 1.0;  // ladder unit for families 2 and 3
};

double box_constant();  // (pi/6)^{1/3}

ReferenceSpec type1_spec(const TypeIRow& row, double plateau);
ReferenceSpec type2_spec(double lambda_ir);
ReferenceSpec type3_spec(const TypeIRow& row);

double reference_type1(const ReferenceSpec& s, const Eigen::Vector3d& x);
double reference_type2(const ReferenceSpec& s, const Eigen::Vector3d& k);
double reference_type3(const ReferenceSpec& s, const Eigen::Vector3d& x);
double reference_value(const ReferenceSpec& s, const Eigen::Vector3d& x);

// Plateau of e^{-x^2/4} x^s, the local-term amplitude.
double local_plateau(int s);
double local_target(int s, double x);

struct SuccessReport {
  double p_succ = 0.0;
  int rounds = 0;  // 0 with flagged = true below the 3-round threshold
  bool flagged = false;
  std::int64_t violations = 0;
  std::optional<IVec3> first_violation;
  std::int64_t points = 0;
};

int rounds_for(double p, bool* flagged = nullptr);

struct DominationError : std::runtime_error {
  IVec3 p;
  double p_succ;
  std::int64_t violations;
  DominationError(const IVec3& at, double ps, std::int64_t nv);
};

enum class DominationMode { Strict, Report };

using PointFn = std::function<double(const Eigen::Vector3d& k)>;

// Sum over p in [-m, m] (origin skipped when skip_zero) of target^2 / reference^2. Strict mode throws
// DominationError when the reference falls below |target| anywhere (relative slack 1e-12).
SuccessReport success_probability(const PointFn& target, const PointFn& reference, const IVec3& m,
                                  const Eigen::Matrix3d& b, bool skip_zero,
                                  DominationMode mode = DominationMode::Strict, Exec exec = Exec::Parallel);

// Smallest nonzero |k| in the exchange set.
double infrared_cutoff(const IVec3& m, const Eigen::Matrix3d& b);

SuccessReport coulomb_type2_success(const BasisSpec& basis, bool exchange_set, DominationMode mode);
SuccessReport local_type1_success(int s, double r_loc, const BasisSpec& electron, const ReferenceTable& t,
                                  DominationMode mode);
SuccessReport local_type3_success(double r_loc, const BasisSpec& electron, const ReferenceTable& t,
                                  DominationMode mode);

// Max |G_alpha| over the electron basis.
double nonlocal_plateau(const NonlocalEigen& e, int alpha, const BasisSpec& electron);
SuccessReport nonlocal_type1_success(const PseudoIonParams& p, int l, int alpha, const BasisSpec& electron,
                                     const ReferenceTable& t, DominationMode mode);

struct QhoResult {
  int level = 0;
  double q_star = 0.0;
  double gamma = 0.0;
  double d = 0.0;
  double plateau = 0.0;
  double p_succ = 0.0;
  int rounds = 0;
  std::int64_t violations = 0;
};

// Grid index of the first violation is reported in DominationError::p[0].
// Unnormalized e^{-q^2/2} H_l(q), physicists' Hermite polynomial.
double qho_target(int level, double q);
double qho_reference_value(const QhoResult& r, double q);

struct QhoOptions {
  int max_level = 64;
  int grid_points = 4096;
  double span_pad = 12.0;
  bool literal_ground_constants = false;  // gamma_0 = -1/2, d_0 = pi^{-1/4}, q*_0 = 1
  DominationMode mode = DominationMode::Strict;
};

QhoResult qho_reference(int level, const QhoOptions& opt = {});

}  // namespace qdyn
