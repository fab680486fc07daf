#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qdyn/cell_basis.hpp"
#include "qdyn/pseudopotential.hpp"
#include "qdyn/toffoli_model.hpp"

namespace qdyn {

struct SpeciesCount {
  PseudoIonParams params;
  int count = 0;
};

struct InstanceSpec {
  std::string name;
  std::vector<SpeciesCount> census;  // file order
  SimulationCell cell;
  std::array<double, 3> lambda_el{};
  std::array<double, 3> lambda_ion{};
  double trunc_kappa = 1.5;
  std::optional<IVec3> trunc_p_max;
  BitConfig bits;

  std::int64_t eta_val = 0;
  std::int64_t eta_ion = 0;
  std::int64_t eta() const { return eta_val + eta_ion; }

  BasisSpec electron;
  BasisSpec ion;
  BasisSpec trunc;

  // Sum over ordered pairs I != J of Z_I Z_J.
  double ion_charge_pairs() const;
  double inverse_mass_sum() const;
};

// Resolves labels against the HGH table and derives particle counts and bases.
InstanceSpec instance_from_json(const nlohmann::json& j, const std::vector<PseudoIonParams>& table);
InstanceSpec load_instance(const std::string& path, const std::vector<PseudoIonParams>& table);
InstanceSpec load_instance(const std::string& path);

// Names of the shipped instances, in catalogue order.
const std::vector<std::string>& shipped_instance_names();
std::string shipped_instance_path(const std::string& name);

void derive_bases(InstanceSpec& inst);

std::int64_t system_qubits(const InstanceSpec& inst);

CostInputs cost_inputs(const InstanceSpec& inst);

}  // namespace qdyn
