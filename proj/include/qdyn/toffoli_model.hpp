#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace qdyn {

// Tunable register widths. eps_T_exp is e with eps_T = 2^-e.
struct BitConfig {
  int b_P = 16;
  int b_T = 16;
  int eps_T_exp = 16;
  int b = 32;
  int b_bar = 32;
  int b_k = 16;
  int b_g = 16;
  int b_kappa = 16;
  int b_Z = 16;
  int b_I = 16;
  int b_eta_el = 16;
  int b_s = 16;
  int b_keep = 16;
  int b_M = 16;
  int b_alpha_l = 16;
  int b_pl = 16;
  int b_exp = 16;
  int b_rot = 16;
  int b_Mt = 16;
  int log_M = 16;
  int R = 2;

  void validate() const;
};

void to_json(nlohmann::json& j, const BitConfig& c);
// Missing keys keep their current values.
void apply_bits_json(const nlohmann::json& j, BitConfig& c);

enum class Term { Shared, Kinetic, Coulomb, Local, NonLocal };
std::string to_string(Term t);

struct CostRow {
  std::string name;
  std::int64_t toffolis = 0;
  std::int64_t ancillae = 0;
  Term term = Term::Shared;
};

// Integer inputs of every cost formula.
struct CostInputs {
  std::int64_t eta_val = 0;
  std::int64_t eta_ion = 0;
  std::int64_t Z = 0;  // number of pseudoion species
  int n[3] = {0, 0, 0};
  int n_bar[3] = {0, 0, 0};
};

std::vector<CostRow> cost_shared(const CostInputs& in, const BitConfig& cfg);
std::vector<CostRow> cost_kinetic(const CostInputs& in, const BitConfig& cfg);
std::vector<CostRow> cost_coulomb(const CostInputs& in, const BitConfig& cfg);
std::vector<CostRow> cost_local(const CostInputs& in, const BitConfig& cfg);
std::vector<CostRow> cost_nonlocal(const CostInputs& in, const BitConfig& cfg);

struct CostReport {
  std::vector<CostRow> rows;
  std::int64_t total = 0;
  std::int64_t peak_ancillae = 0;

  std::int64_t term_total(Term t) const;
  double fraction(Term t) const;
  std::int64_t swup_total() const;
};

CostReport block_encoding_cost(const CostInputs& in, const BitConfig& cfg);

// ceil(log2(x)) for x >= 1
int clog2(std::int64_t x);

}  // namespace qdyn
