#include "qdyn/reports.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace qdyn {

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

namespace {

nlohmann::json ivec(const IVec3& v) { return {v[0], v[1], v[2]}; }

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string s;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) s += ',';
    s += c;
    first = false;
  }
  return s + '\n';
}

std::string d(double v) { return format_double(v); }
std::string i(std::int64_t v) { return std::to_string(v); }

}  // namespace

nlohmann::json basis_json(const BasisSpec& b) {
  nlohmann::json j;
  j["role"] = to_string(b.role);
  j["p_max"] = ivec(b.p_max);
  j["n"] = ivec(b.n);
  j["true_cutoffs"] = b.true_cutoffs;
  j["size"] = basis_size(b);
  j["exchange_set_size"] = exchange_set_size(b.p_max);
  return j;
}

nlohmann::json instance_json(const InstanceSpec& inst) {
  nlohmann::json j;
  j["name"] = inst.name;
  j["eta"] = {inst.eta_val, inst.eta_ion, inst.eta()};
  j["cell"] = {{"shape", inst.cell.shape_tag}, {"volume", inst.cell.volume()}};
  nlohmann::json census = nlohmann::json::array();
  for (const auto& s : inst.census) census.push_back({s.params.label, s.count});
  j["census"] = census;
  j["electron"] = basis_json(inst.electron);
  j["ion"] = basis_json(inst.ion);
  j["ion_trunc"] = basis_json(inst.trunc);
  j["system_qubits"] = system_qubits(inst);
  nlohmann::json bits;
  to_json(bits, inst.bits);
  j["bits"] = bits;
  return j;
}

nlohmann::json lambdas_json(const TermLambdas& l) {
  return {{"T_el", l.T_el}, {"T_ion", l.T_ion}, {"V_el", l.V_el}, {"V_ion", l.V_ion},
          {"loc", l.loc},   {"NL", l.NL},       {"total", l.total()}};
}

nlohmann::json rescaling_json(const RescalingReport& r) {
  nlohmann::json j;
  j["exact"] = lambdas_json(r.exact);
  j["bound"] = lambdas_json(r.bound);
  nlohmann::json per = nlohmann::json::array();
  for (const auto& p : r.per_ion)
    per.push_back({{"label", p.label}, {"loc", p.loc}, {"nl", p.nl}, {"loc_bound", p.loc_bound},
                   {"nl_bound", p.nl_bound}});
  j["per_ion"] = per;
  return j;
}

nlohmann::json cost_json(const CostReport& c) {
  nlohmann::json j;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : c.rows)
    rows.push_back({{"name", r.name}, {"term", to_string(r.term)}, {"toffolis", r.toffolis}, {"ancillae", r.ancillae}});
  j["rows"] = rows;
  j["total"] = c.total;
  j["peak_ancillae"] = c.peak_ancillae;
  nlohmann::json terms;
  for (Term t : {Term::Shared, Term::Kinetic, Term::Coulomb, Term::Local, Term::NonLocal})
    terms[to_string(t)] = {{"toffolis", c.term_total(t)}, {"fraction", c.fraction(t)}};
  j["terms"] = terms;
  j["swup_total"] = c.swup_total();
  return j;
}

nlohmann::json plan_json(const EvolutionPlan& p) {
  return {{"lambda", p.lambda},
          {"t_au", p.t},
          {"tau", p.tau},
          {"degree", p.degree},
          {"delta", p.delta},
          {"delta_be", p.delta_be},
          {"iterate_calls", p.iterate_calls},
          {"toffolis_per_call", p.toffolis_per_call},
          {"toffoli_total", p.toffoli_total},
          {"per_fs", p.per_fs}};
}

std::string rescaling_csv(const std::string& instance, const RescalingReport& r) {
  std::string s = csv_line({"instance", "term", "exact", "bound", "ratio"});
  const char* names[] = {"T_el", "T_ion", "V_el", "V_ion", "loc", "NL"};
  auto e = r.exact.as_array(), b = r.bound.as_array();
  for (int k = 0; k < 6; ++k)
    s += csv_line({instance, names[k], d(e[k]), d(b[k]), e[k] > 0 ? d(b[k] / e[k]) : ""});
  s += csv_line({instance, "total", d(r.exact.total()), d(r.bound.total()), d(r.bound.total() / r.exact.total())});
  return s;
}

std::string per_ion_csv(const std::string& instance, const RescalingReport& r) {
  std::string s = csv_line({"instance", "species", "loc", "nl", "loc_bound", "nl_bound"});
  for (const auto& p : r.per_ion) s += csv_line({instance, p.label, d(p.loc), d(p.nl), d(p.loc_bound), d(p.nl_bound)});
  return s;
}

std::string cost_csv(const std::string& instance, const CostReport& c) {
  std::string s = csv_line({"instance", "subroutine", "term", "toffolis", "ancillae"});
  for (const auto& r : c.rows) s += csv_line({instance, r.name, to_string(r.term), i(r.toffolis), i(r.ancillae)});
  return s;
}

std::string plans_csv(const std::string& instance, const std::vector<EvolutionPlan>& plans) {
  std::string s = csv_line({"instance", "t_au", "t_fs", "delta", "lambda", "iterate_calls", "toffolis_per_call",
                            "toffoli_total"});
  for (const auto& p : plans)
    s += csv_line({instance, d(p.t), d(p.t / kAuPerFemtosecond), d(p.delta), d(p.lambda), i(p.iterate_calls),
                   i(p.toffolis_per_call), d(p.toffoli_total)});
  return s;
}

std::string qrs_csv(const std::vector<QrsRow>& rows) {
  std::string s = csv_line({"context", "family", "p_succ", "rounds", "flagged", "violations", "points"});
  for (const auto& r : rows)
    s += csv_line({r.context, r.family, d(r.report.p_succ), i(r.report.rounds), r.report.flagged ? "1" : "0",
                   i(r.report.violations), i(r.report.points)});
  return s;
}

std::string modes_csv(const NormalModes& m) {
  std::string s = "mode,omega_au,omega_cm1";
  for (int r = 0; r < m.vectors.rows(); ++r) s += ",e" + std::to_string(r);
  s += '\n';
  for (int k = 0; k < m.frequencies.size(); ++k) {
    s += std::to_string(k) + ',' + d(m.frequencies(k)) + ',' + d(hartree_to_wavenumber(m.frequencies(k)));
    for (int r = 0; r < m.vectors.rows(); ++r) s += ',' + d(m.vectors(r, k));
    s += '\n';
  }
  return s;
}

std::string counts_csv(const std::vector<std::map<std::string, int>>& counts) {
  std::vector<std::string> species;
  if (!counts.empty())
    for (const auto& [k, v] : counts.front()) species.push_back(k);
  std::string s = "frame";
  for (const auto& sp : species) s += ',' + sp;
  s += '\n';
  for (std::size_t f = 0; f < counts.size(); ++f) {
    s += std::to_string(f);
    for (const auto& sp : species) s += ',' + std::to_string(counts[f].at(sp));
    s += '\n';
  }
  return s;
}

ReportBundle run_full_report(const InstanceSpec& inst, const std::vector<double>& t_grid, double delta, Exec exec) {
  ReportBundle b;
  b.instance = inst.name;
  auto resc = compute_rescaling(inst, exec);
  auto cost = block_encoding_cost(cost_inputs(inst), inst.bits);
  std::vector<EvolutionPlan> plans;
  for (double t : t_grid) plans.push_back(evolution_cost(resc.exact.total(), cost.total, t, delta));

  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["instance"] = instance_json(inst);
  j["rescaling"] = rescaling_json(resc);
  j["cost"] = cost_json(cost);
  nlohmann::json pj = nlohmann::json::array();
  for (const auto& p : plans) pj.push_back(plan_json(p));
  j["plans"] = pj;
  b.files["report.json"] = j.dump(2) + '\n';
  b.files["rescaling.csv"] = rescaling_csv(inst.name, resc);
  b.files["per_ion.csv"] = per_ion_csv(inst.name, resc);
  b.files["cost.csv"] = cost_csv(inst.name, cost);
  b.files["plans.csv"] = plans_csv(inst.name, plans);
  return b;
}

void write_bundle(const ReportBundle& b, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : b.files) {
    std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + name + " in " + dir);
    f << content;
  }
}

}  // namespace qdyn
