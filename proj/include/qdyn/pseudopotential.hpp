#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qdyn {

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_no, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

// One separable projector channel. B is zero-padded to 3x3; dim is the
// number of rows actually given in the parameter file.
struct ProjectorBlock {
  int l = 0;
  double r = 0.0;
  int dim = 0;
  Eigen::Matrix3d B = Eigen::Matrix3d::Zero();
};

struct PseudoIonParams {
  std::string label;
  int Z_full = 0;
  int Z_pi = 0;
  double mass = 0.0;
  double r_loc = 0.0;
  std::array<double, 4> C{};
  std::vector<ProjectorBlock> blocks;  // ascending l, at most one per l

  const ProjectorBlock* block(int l) const;
  int l_max() const;  // -1 when there is no projector
};

void validate(const PseudoIonParams& p);

std::vector<PseudoIonParams> parse_hgh(std::string_view text);
std::string serialize_hgh(const std::vector<PseudoIonParams>& records);
std::vector<PseudoIonParams> load_hgh_file(const std::string& path);
std::string default_hgh_path();
const PseudoIonParams& find_species(const std::vector<PseudoIonParams>& table,
                                    const std::string& label);

// c[s + 1] for s = -1..3
using LocalCoeffs = std::array<double, 5>;
LocalCoeffs local_coeffs(const PseudoIonParams& p);

// a in 1..3, l in 0..2
double g_radial(int a, int l, double x);

struct NonlocalEigen {
  int l = 0;
  double r = 0.0;
  Eigen::Vector3d D = Eigen::Vector3d::Zero();
  Eigen::Matrix3d X = Eigen::Matrix3d::Identity();
};

NonlocalEigen nonlocal_eigen(const ProjectorBlock& block);
std::vector<NonlocalEigen> nonlocal_eigen(const PseudoIonParams& p);

// alpha in 0..2 indexes the columns of X
double G_alpha(const NonlocalEigen& e, int alpha, double x);
double G_alpha(const PseudoIonParams& p, int l, int alpha, double x);

// Local matrix element at |k_q|^2 = ksq for cell volume omega.
double h_loc(const PseudoIonParams& p, double ksq, double omega);

double legendre_eval(int l, double cos_theta);

// (2/pi) * integral_0^upper x^2 G_alpha(x)^2 dx
double nl_bound_coefficient(const NonlocalEigen& e, int alpha, double upper = 12.0);

}  // namespace qdyn
