#include "qdyn/instance.hpp"

#include <fstream>
#include <stdexcept>

namespace qdyn {

double InstanceSpec::ion_charge_pairs() const {
  double z = 0.0, z2 = 0.0;
  for (const auto& s : census) {
    z += static_cast<double>(s.count) * s.params.Z_pi;
    z2 += static_cast<double>(s.count) * s.params.Z_pi * s.params.Z_pi;
  }
  return z * z - z2;
}

double InstanceSpec::inverse_mass_sum() const {
  double s = 0.0;
  for (const auto& c : census) s += c.count / c.params.mass;
  return s;
}

namespace {

std::array<double, 3> triple(const nlohmann::json& j, const char* what) {
  if (j.is_number()) {
    double v = j.get<double>();
    return {v, v, v};
  }
  if (j.is_array() && j.size() == 3) return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  throw std::invalid_argument(std::string(what) + " must be a number or a 3-array");
}

SimulationCell cell_from_json(const nlohmann::json& j) {
  std::string shape = j.value("shape", "general");
  if (shape == "cuboid" || shape == "rhombohedron-120") {
    auto L = triple(j.at("lengths"), "cell.lengths");
    return shape == "cuboid" ? cuboid_cell(L[0], L[1], L[2]) : rhombohedral120_cell(L[0], L[1], L[2]);
  }
  const auto& v = j.at("vectors");
  if (!v.is_array() || v.size() != 3) throw std::invalid_argument("cell.vectors must hold 3 vectors");
  SimulationCell c;
  for (int r = 0; r < 3; ++r) {
    auto row = triple(v[r], "cell.vectors row");
    for (int k = 0; k < 3; ++k) c.A(r, k) = row[k];
  }
  c.shape_tag = "general";
  return c;
}

}  // namespace

void derive_bases(InstanceSpec& inst) {
  inst.electron = build_basis(inst.cell, inst.lambda_el, BasisRole::Electron);
  inst.ion = build_basis(inst.cell, inst.lambda_ion, BasisRole::Ion);
  inst.trunc = inst.trunc_p_max ? trunc_basis_from_pmax(inst.cell, *inst.trunc_p_max)
                                : build_basis(inst.cell, {1.0, 1.0, 1.0}, BasisRole::IonTrunc, inst.trunc_kappa);
}

InstanceSpec instance_from_json(const nlohmann::json& j, const std::vector<PseudoIonParams>& table) {
  InstanceSpec inst;
  inst.name = j.at("name").get<std::string>();
  // Census: array of [label, count] pairs, or an object label -> count.
  std::vector<std::pair<std::string, int>> entries;
  const auto& census = j.at("census");
  if (census.is_object()) {
    for (const auto& [label, count] : census.items()) entries.emplace_back(label, count.get<int>());
  } else if (census.is_array()) {
    for (const auto& e : census) entries.emplace_back(e.at(0).get<std::string>(), e.at(1).get<int>());
  } else {
    throw std::invalid_argument("census must be an array of [label, count] or an object");
  }
  for (const auto& [label, count] : entries) {
    SpeciesCount sc;
    sc.params = find_species(table, label);
    sc.count = count;
    if (sc.count < 0) throw std::invalid_argument("negative species count");
    for (const auto& prev : inst.census)
      if (prev.params.label == sc.params.label) throw std::invalid_argument("species listed twice: " + sc.params.label);
    inst.census.push_back(sc);
  }
  for (const auto& s : inst.census) {
    inst.eta_val += static_cast<std::int64_t>(s.count) * s.params.Z_pi;
    inst.eta_ion += s.count;
  }
  if (j.contains("eta")) {
    auto e = j.at("eta");
    if (e.at(0).get<std::int64_t>() != inst.eta_val || e.at(1).get<std::int64_t>() != inst.eta_ion ||
        e.at(2).get<std::int64_t>() != inst.eta())
      throw std::invalid_argument("census does not reproduce the declared particle counts");
  }
  inst.cell = cell_from_json(j.at("cell"));
  const auto& cut = j.at("cutoffs");
  inst.lambda_el = triple(cut.at("electron"), "cutoffs.electron");
  inst.lambda_ion = triple(cut.at("ion"), "cutoffs.ion");
  if (cut.contains("trunc")) {
    const auto& t = cut.at("trunc");
    if (t.contains("p_max")) {
      const auto& p = t.at("p_max");
      inst.trunc_p_max = IVec3{p.at(0).get<int>(), p.at(1).get<int>(), p.at(2).get<int>()};
    }
    inst.trunc_kappa = t.value("kappa", 1.5);
  }
  if (j.contains("bits")) apply_bits_json(j.at("bits"), inst.bits);
  inst.bits.validate();
  derive_bases(inst);
  return inst;
}

InstanceSpec load_instance(const std::string& path, const std::vector<PseudoIonParams>& table) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open instance file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return instance_from_json(j, table);
}

InstanceSpec load_instance(const std::string& path) { return load_instance(path, load_hgh_file(default_hgh_path())); }

const std::vector<std::string>& shipped_instance_names() {
  static const std::vector<std::string> names = {"nh3bf3",   "dmtm_mol", "dmtm_3x3", "dmtm_5x5",
                                                 "dmtm_9x9", "wgs_233",  "wgs_255"};
  return names;
}

std::string shipped_instance_path(const std::string& name) {
  return std::string(QDYN_DATA_DIR) + "/instances/" + name + ".json";
}

std::int64_t system_qubits(const InstanceSpec& inst) {
  return inst.eta_val * n_total(inst.electron) + inst.eta_ion * n_total(inst.ion);
}

CostInputs cost_inputs(const InstanceSpec& inst) {
  CostInputs in;
  in.eta_val = inst.eta_val;
  in.eta_ion = inst.eta_ion;
  in.Z = 0;
  for (const auto& s : inst.census)
    if (s.count > 0) ++in.Z;
  for (int a = 0; a < 3; ++a) {
    in.n[a] = inst.electron.n[a];
    in.n_bar[a] = inst.ion.n[a];
  }
  return in;
}

}  // namespace qdyn
