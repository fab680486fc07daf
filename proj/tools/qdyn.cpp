#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qdyn/evolution_planner.hpp"
#include "qdyn/initprep.hpp"
#include "qdyn/instance.hpp"
#include "qdyn/qci.hpp"
#include "qdyn/qrs_design.hpp"
#include "qdyn/reports.hpp"
#include "qdyn/rescaling.hpp"
#include "qdyn/toffoli_model.hpp"

using namespace qdyn;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

struct Common {
  std::string instance = "nh3bf3";
  std::string bits;
  std::string out;
  std::string format = "json";
};

InstanceSpec resolve_instance(const Common& c) {
  std::string path = std::filesystem::exists(c.instance) ? c.instance : shipped_instance_path(c.instance);
  if (!std::filesystem::exists(path)) throw std::invalid_argument("unknown instance '" + c.instance + "'");
  auto inst = load_instance(path);
  if (!c.bits.empty()) {
    std::ifstream f(c.bits);
    if (!f) throw std::invalid_argument("cannot open bits file " + c.bits);
    apply_bits_json(nlohmann::json::parse(f, nullptr, true, true), inst.bits);
    inst.bits.validate();
  }
  return inst;
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot write " + c.out);
  f << text;
}

// "2", "2au" or "0.5fs" -> atomic units
double parse_time(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  std::string unit = s.substr(pos);
  if (unit.empty() || unit == "au") return v;
  if (unit == "fs") return v * kAuPerFemtosecond;
  throw std::invalid_argument("unknown time unit '" + unit + "'");
}

int run_estimate(const Common& c, const std::vector<std::string>& times, double delta, bool use_bound) {
  auto inst = resolve_instance(c);
  auto cost = block_encoding_cost(cost_inputs(inst), inst.bits);
  double lambda = use_bound ? lambda_bounds(inst).total() : compute_rescaling(inst).exact.total();
  std::vector<EvolutionPlan> plans;
  for (const auto& t : times) plans.push_back(evolution_cost(lambda, cost.total, parse_time(t), delta));
  if (c.format == "csv") {
    emit(c, plans_csv(inst.name, plans));
  } else {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["instance"] = inst.name;
    j["lambda_source"] = use_bound ? "bound" : "exact";
    j["cost"] = cost_json(cost);
    j["plans"] = nlohmann::json::array();
    for (const auto& p : plans) j["plans"].push_back(plan_json(p));
    emit(c, j.dump(2) + "\n");
  }
  return 0;
}

int run_rescaling(const Common& c) {
  auto inst = resolve_instance(c);
  auto r = compute_rescaling(inst);
  if (c.format == "csv") {
    emit(c, rescaling_csv(inst.name, r) + per_ion_csv(inst.name, r));
  } else {
    nlohmann::json j = rescaling_json(r);
    j["schema_version"] = kSchemaVersion;
    j["instance"] = inst.name;
    emit(c, j.dump(2) + "\n");
  }
  return 0;
}

void dump_cuts(const std::string& dir, const InstanceSpec& inst, const ReferenceTable& table) {
  std::filesystem::create_directories(dir);
  const auto& e = inst.electron;
  const int m = 2 * e.p_max[0];
  auto coul = type2_spec(infrared_cutoff({m, 2 * e.p_max[1], 2 * e.p_max[2]}, e.b));
  std::ofstream f(std::filesystem::path(dir) / "cut_coulomb.csv");
  f << "p1,k,target,reference\n";
  for (int p = 1; p <= m; ++p) {
    Eigen::Vector3d k = p * e.b.row(0).transpose();
    f << p << ',' << format_double(k.norm()) << ',' << format_double(1.0 / k.norm()) << ','
      << format_double(reference_type2(coul, k)) << '\n';
  }
  for (const auto& sc : inst.census) {
    double r = sc.params.r_loc;
    std::ofstream g(std::filesystem::path(dir) / ("cut_local_" + sc.params.label.substr(0, sc.params.label.find('^')) +
                                                  sc.params.label.substr(sc.params.label.find('^') + 1) + ".csv"));
    g << "p1,x";
    for (int s = 0; s <= 3; ++s) g << ",target_s" << s << ",reference_s" << s;
    g << '\n';
    for (int p = 0; p <= m; ++p) {
      Eigen::Vector3d x = p * e.b.row(0).transpose() * r;
      g << p << ',' << format_double(x.norm());
      for (int s = 0; s <= 3; ++s) {
        auto spec = type1_spec(table.local[s + 1], local_plateau(s));
        g << ',' << format_double(local_target(s, x.norm())) << ',' << format_double(reference_type1(spec, x));
      }
      g << '\n';
    }
  }
}

int run_qrs_check(const Common& c, int qho_levels, const std::string& cuts) {
  auto inst = resolve_instance(c);
  auto table = load_reference_table(default_reference_table_path());
  const auto mode = DominationMode::Report;
  std::vector<QrsRow> rows;
  rows.push_back({"coulomb", "type2", coulomb_type2_success(inst.electron, true, mode)});
  for (const auto& sc : inst.census) {
    const auto& p = sc.params;
    rows.push_back({p.label + " s=-1", "type3", local_type3_success(p.r_loc, inst.electron, table, mode)});
    for (int s = 0; s <= 3; ++s)
      rows.push_back({p.label + " s=" + std::to_string(s), "type1",
                      local_type1_success(s, p.r_loc, inst.electron, table, mode)});
    for (const auto& blk : p.blocks)
      for (int a = 0; a < blk.dim; ++a)
        rows.push_back({p.label + " l=" + std::to_string(blk.l) + " a=" + std::to_string(a), "type1",
                        nonlocal_type1_success(p, blk.l, a, inst.electron, table, mode)});
  }
  QhoOptions opt;
  opt.mode = mode;
  for (int l = 0; l < qho_levels; ++l) {
    auto q = qho_reference(l, opt);
    SuccessReport r;
    r.p_succ = q.p_succ;
    r.rounds = rounds_for(q.p_succ, &r.flagged);
    r.violations = q.violations;
    r.points = opt.grid_points;
    rows.push_back({"qho l=" + std::to_string(l), "qho", r});
  }
  emit(c, qrs_csv(rows));
  if (!cuts.empty()) dump_cuts(cuts, inst, table);
  return 0;
}

int run_modes(const Common& c, const std::string& input, std::uint64_t seed) {
  auto gh = load_geometry_hessian(input);
  auto m = normal_modes(gh.geometry, gh.hessian, seed);
  if (c.format == "csv") {
    emit(c, modes_csv(m));
  } else {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["topology"] = to_string(gh.geometry.topology);
    j["omega_au"] = std::vector<double>(m.frequencies.data(), m.frequencies.data() + m.frequencies.size());
    std::vector<double> cm;
    for (int k = 0; k < m.frequencies.size(); ++k) cm.push_back(hartree_to_wavenumber(m.frequencies(k)));
    j["omega_cm1"] = cm;
    j["zero_residuals"] =
        std::vector<double>(m.zero_residuals.data(), m.zero_residuals.data() + m.zero_residuals.size());
    emit(c, j.dump(2) + "\n");
  }
  return 0;
}

int run_fingerprint(const Common& c, const std::string& xyz, const std::string& models) {
  auto frames = load_xyz(xyz);
  auto rules = rules_from_models(load_fingerprint_models(models.empty() ? default_fingerprint_path() : models));
  auto counts = classify_trajectory(frames, rules);
  if (c.format == "csv") {
    emit(c, counts_csv(counts));
  } else {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["frames"] = counts;
    emit(c, j.dump(2) + "\n");
  }
  return 0;
}

int run_report(const Common& c, const std::vector<std::string>& times, double delta, bool all) {
  if (c.out.empty()) throw std::invalid_argument("report needs --out <directory>");
  std::vector<double> grid;
  for (const auto& t : times) grid.push_back(parse_time(t));
  std::vector<std::string> names = all ? shipped_instance_names() : std::vector<std::string>{c.instance};
  for (const auto& n : names) {
    Common ci = c;
    ci.instance = n;
    auto inst = resolve_instance(ci);
    auto b = run_full_report(inst, grid, delta);
    write_bundle(b, all ? (std::filesystem::path(c.out) / n).string() : c.out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resource estimates for first-quantized reaction dynamics"};
  app.require_subcommand(1);
  Common common;
  std::vector<std::string> times{"1"};
  double delta = 1e-9;
  bool use_bound = false, all = false;
  int qho_levels = 40;
  std::string cuts, input, xyz, models;
  std::uint64_t seed = 1;

  auto add_common = [&](CLI::App* s, bool with_instance) {
    if (with_instance) {
      s->add_option("--instance", common.instance, "Shipped instance name or JSON path");
      s->add_option("--bits", common.bits, "JSON file overriding bit widths");
    }
    s->add_option("--out", common.out, "Output file (directory for report)");
    s->add_option("--format", common.format)->check(CLI::IsMember({"json", "csv"}));
  };

  auto* est = app.add_subcommand("estimate", "Toffoli budget for time evolution");
  add_common(est, true);
  est->add_option("--time", times, "Times, e.g. 1, 2au, 0.5fs")->delimiter(',');
  est->add_option("--delta", delta);
  est->add_flag("--lambda-bound", use_bound, "Use the closed-form bound instead of the lattice sums");

  auto* res = app.add_subcommand("rescaling", "Rescaling factors per term");
  add_common(res, true);

  auto* qrs = app.add_subcommand("qrs-check", "Rejection-sampling success probabilities");
  add_common(qrs, true);
  qrs->add_option("--qho-levels", qho_levels)->check(CLI::Range(0, 65));
  qrs->add_option("--cuts", cuts, "Directory for per-axis cut CSVs");

  auto* modes = app.add_subcommand("modes", "Normal modes from a geometry+Hessian file");
  add_common(modes, false);
  modes->add_option("--input", input)->required();
  modes->add_option("--seed", seed);

  auto* fp = app.add_subcommand("fingerprint", "Species counts along an XYZ trajectory");
  add_common(fp, false);
  fp->add_option("--xyz", xyz)->required();
  fp->add_option("--models", models);

  auto* rep = app.add_subcommand("report", "Full report bundle");
  add_common(rep, true);
  rep->add_option("--time", times)->delimiter(',');
  rep->add_option("--delta", delta);
  rep->add_flag("--all", all, "Every shipped instance");
  rep->add_option("--seed", seed, "Accepted for reproducibility; reports use no randomness");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*est) return run_estimate(common, times, delta, use_bound);
    if (*res) return run_rescaling(common);
    if (*qrs) return run_qrs_check(common, qho_levels, cuts);
    if (*modes) return run_modes(common, input, seed);
    if (*fp) return run_fingerprint(common, xyz, models);
    if (*rep) return run_report(common, times, delta, all);
  } catch (const DominationError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const NotAMinimumError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const BudgetError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::domain_error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::overflow_error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
