#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace qdyn {

// 4 / (sqrt(2 pi) e^{1/13})
double jacobi_anger_constant();

constexpr double kAuPerFemtosecond = 41.3414;

// ceil(|tau| e / 2 + ln(c / delta)), clamped at 0.
std::int64_t jacobi_anger_degree(double tau, double delta);

struct EvolutionPlan {
  double lambda = 0.0;
  double t = 0.0;  // a.u.
  double tau = 0.0;
  std::int64_t degree = 0;
  double delta = 0.0;
  double delta_be = 0.0;  // 0 when not budgeted
  std::int64_t iterate_calls = 0;
  std::int64_t toffolis_per_call = 0;
  double toffoli_total = 0.0;
  double per_fs = 0.0;  // toffolis per femtosecond of simulated time at this t
};

// ceil(|tau| e / 2 + ln(2c / delta)) + 2
std::int64_t iterate_calls(double tau, double delta);

// budget_be: also fills delta_be = delta / (2|t|); throws at t = 0.
EvolutionPlan evolution_cost(double lambda, std::int64_t toffolis_per_call, double t, double delta,
                             bool budget_be = false);

enum class AveragingMode { Sample, Coherent };
AveragingMode averaging_mode_from_string(const std::string& s);

// Unit constants: sample (C_init + C_algo) / (s eps^2); coherent (|S| C_init + C_algo) / (sqrt(s) eps).
double averaging_cost(AveragingMode mode, double s, double eps, double c_init, double c_algo,
                      std::int64_t s_size);

struct AsymptoticTerms {
  double electron_kinetic = 0.0;  // eta^{4/3} |G|^{2/3}
  double valence = 0.0;           // eta^{2/3} eta_val^2 |G|^{1/3}
  double ionic = 0.0;             // eta eta_val eta_ion
  double total() const { return electron_kinetic + valence + ionic; }
};

AsymptoticTerms asymptotic_terms(std::int64_t eta_val, std::int64_t eta_ion, std::int64_t basis_size);

// One-time preparation estimate eta_val |G| + eta_ion |G_bar|.
double state_prep_estimate(std::int64_t eta_val, std::int64_t eta_ion, std::int64_t g, std::int64_t g_bar);

}  // namespace qdyn
