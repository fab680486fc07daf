#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "qdyn/instance.hpp"
#include "qdyn/lattice_sum.hpp"

namespace qdyn {

// Per electron-pseudoion pair values for one species.
struct PairRescaling {
  std::string label;
  double loc = 0.0;
  double nl = 0.0;
  double loc_bound = 0.0;
  double nl_bound = 0.0;
};

struct TermLambdas {
  double T_el = 0.0;
  double T_ion = 0.0;
  double V_el = 0.0;
  double V_ion = 0.0;
  double loc = 0.0;
  double NL = 0.0;

  double total() const { return T_el + T_ion + V_el + V_ion + loc + NL; }
  std::array<double, 6> as_array() const { return {T_el, T_ion, V_el, V_ion, loc, NL}; }
};

struct RescalingReport {
  TermLambdas exact;
  TermLambdas bound;
  std::vector<PairRescaling> per_ion;  // census order
};

// Raw sums over the exchange set G0 of e^{-x^2/2} x^{2s}, s = -1..3, x = |k| r_loc.
struct LocalSums {
  std::array<double, 5> S{};
};

// One pass over G0 for all species; also returns sum 1/|k|^2 in `coulomb`.
std::vector<LocalSums> local_sums(const std::vector<const PseudoIonParams*>& species, const BasisSpec& electron,
                                  double* coulomb, Exec exec = Exec::Parallel);

// Sum over the electron basis G of G_alpha(|k| r_l)^2, indexed [l][alpha] (zero where absent).
using NlSums = std::array<std::array<double, 3>, 3>;
std::vector<NlSums> nonlocal_sums(const std::vector<const PseudoIonParams*>& species, const BasisSpec& electron,
                                  Exec exec = Exec::Parallel);

double pair_loc_from_sums(const PseudoIonParams& p, const LocalSums& s, double omega);
double pair_nl_from_sums(const PseudoIonParams& p, const NlSums& s, double omega);

double lambda_tilde_loc(const PseudoIonParams& p, const BasisSpec& electron, Exec exec = Exec::Parallel);
double lambda_tilde_nl(const PseudoIonParams& p, const BasisSpec& electron, Exec exec = Exec::Parallel);
double lambda_tilde_loc_bound(const PseudoIonParams& p);
double lambda_tilde_nl_bound(const PseudoIonParams& p);

std::pair<double, double> lambda_kinetic(const InstanceSpec& inst);
std::pair<double, double> lambda_coulomb(const InstanceSpec& inst, Exec exec = Exec::Parallel);
std::pair<double, std::vector<double>> lambda_local(const InstanceSpec& inst, Exec exec = Exec::Parallel);
std::pair<double, std::vector<double>> lambda_nonlocal(const InstanceSpec& inst, Exec exec = Exec::Parallel);
TermLambdas lambda_bounds(const InstanceSpec& inst);

RescalingReport compute_rescaling(const InstanceSpec& inst, Exec exec = Exec::Parallel);

}  // namespace qdyn
