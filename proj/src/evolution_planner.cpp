#include "qdyn/evolution_planner.hpp"

#include <cmath>
#include <stdexcept>

namespace qdyn {

double jacobi_anger_constant() { return 4.0 / (std::sqrt(2.0 * M_PI) * std::exp(1.0 / 13.0)); }

namespace {

std::int64_t ceil_to_int(double v) {
  if (!std::isfinite(v)) throw std::domain_error("non-finite degree");
  return static_cast<std::int64_t>(std::ceil(v));
}

void check_delta(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
}

}  // namespace

std::int64_t jacobi_anger_degree(double tau, double delta) {
  check_delta(delta);
  double v = std::abs(tau) * M_E / 2 + std::log(jacobi_anger_constant() / delta);
  return std::max<std::int64_t>(0, ceil_to_int(v));
}

std::int64_t iterate_calls(double tau, double delta) {
  check_delta(delta);
  double v = std::abs(tau) * M_E / 2 + std::log(2 * jacobi_anger_constant() / delta);
  return std::max<std::int64_t>(0, ceil_to_int(v)) + 2;
}

EvolutionPlan evolution_cost(double lambda, std::int64_t toffolis_per_call, double t, double delta,
                             bool budget_be) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  if (toffolis_per_call < 0) throw std::invalid_argument("negative per-call cost");
  EvolutionPlan p;
  p.lambda = lambda;
  p.t = t;
  p.tau = lambda * t;
  p.delta = delta;
  p.degree = jacobi_anger_degree(p.tau, delta);
  p.iterate_calls = iterate_calls(p.tau, delta);
  if (budget_be) {
    if (t == 0.0) throw std::invalid_argument("block-encoding budget needs t != 0");
    p.delta_be = delta / (2 * std::abs(t));
  }
  p.toffolis_per_call = toffolis_per_call;
  p.toffoli_total = static_cast<double>(p.iterate_calls) * static_cast<double>(toffolis_per_call);
  if (t != 0.0) p.per_fs = p.toffoli_total / std::abs(t) * kAuPerFemtosecond;
  return p;
}

AveragingMode averaging_mode_from_string(const std::string& s) {
  if (s == "sample") return AveragingMode::Sample;
  if (s == "coherent") return AveragingMode::Coherent;
  throw std::invalid_argument("unknown averaging mode '" + s + "'");
}

double averaging_cost(AveragingMode mode, double s, double eps, double c_init, double c_algo,
                      std::int64_t s_size) {
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("yield must lie in (0, 1]");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (mode == AveragingMode::Sample) return (c_init + c_algo) / (s * eps * eps);
  return (static_cast<double>(s_size) * c_init + c_algo) / (std::sqrt(s) * eps);
}

AsymptoticTerms asymptotic_terms(std::int64_t eta_val, std::int64_t eta_ion, std::int64_t basis_size) {
  double ev = static_cast<double>(eta_val), ei = static_cast<double>(eta_ion);
  double eta = ev + ei, G = static_cast<double>(basis_size);
  AsymptoticTerms a;
  a.electron_kinetic = std::pow(eta, 4.0 / 3) * std::pow(G, 2.0 / 3);
  a.valence = std::pow(eta, 2.0 / 3) * ev * ev * std::cbrt(G);
  a.ionic = eta * ev * ei;
  return a;
}

double state_prep_estimate(std::int64_t eta_val, std::int64_t eta_ion, std::int64_t g, std::int64_t g_bar) {
  return static_cast<double>(eta_val) * static_cast<double>(g) +
         static_cast<double>(eta_ion) * static_cast<double>(g_bar);
}

}  // namespace qdyn
