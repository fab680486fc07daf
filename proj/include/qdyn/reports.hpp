#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "qdyn/evolution_planner.hpp"
#include "qdyn/initprep.hpp"
#include "qdyn/instance.hpp"
#include "qdyn/qrs_design.hpp"
#include "qdyn/rescaling.hpp"
#include "qdyn/toffoli_model.hpp"

namespace qdyn {

constexpr int kSchemaVersion = 1;

// Doubles are printed with 17 significant digits everywhere below.
std::string format_double(double v);

nlohmann::json basis_json(const BasisSpec& b);
nlohmann::json instance_json(const InstanceSpec& inst);
nlohmann::json lambdas_json(const TermLambdas& l);
nlohmann::json rescaling_json(const RescalingReport& r);
nlohmann::json cost_json(const CostReport& c);
nlohmann::json plan_json(const EvolutionPlan& p);

std::string rescaling_csv(const std::string& instance, const RescalingReport& r);
std::string per_ion_csv(const std::string& instance, const RescalingReport& r);
std::string cost_csv(const std::string& instance, const CostReport& c);
std::string plans_csv(const std::string& instance, const std::vector<EvolutionPlan>& plans);

struct QrsRow {
  std::string context;  // e.g. "coulomb", "local s=2", "N^5 l=0 a=1", "qho l=3"
  std::string family;
  SuccessReport report;
};
std::string qrs_csv(const std::vector<QrsRow>& rows);

std::string modes_csv(const NormalModes& m);
std::string counts_csv(const std::vector<std::map<std::string, int>>& counts);

struct ReportBundle {
  std::string instance;
  std::map<std::string, std::string> files;  // file name -> contents
};

ReportBundle run_full_report(const InstanceSpec& inst, const std::vector<double>& t_grid, double delta,
                             Exec exec = Exec::Parallel);

// Writes every file of the bundle under dir (created when missing).
void write_bundle(const ReportBundle& b, const std::string& dir);

}  // namespace qdyn
