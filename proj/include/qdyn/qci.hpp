#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qdyn {

constexpr double kBohrToAngstrom = 0.529177210903;

int atomic_number(const std::string& symbol);

// Diagonal 0.5 z^2.4, off-diagonal z_i z_j / |x_i - x_j|. Positions in angstrom.
Eigen::MatrixXd coulomb_matrix(const std::vector<Eigen::Vector3d>& positions, const std::vector<double>& charges);

// u = (m_1..m_p, n_1..n_p) raised elementwise to 1, 2, .., q and concatenated.
// m_k = sum_ij |(M^k)_ij|^2, n_k likewise for N_ij = 1 / M_ij.
Eigen::VectorXd features(const std::vector<Eigen::Vector3d>& positions, const std::vector<double>& charges, int p,
                         int q);

struct FingerprintModel {
  std::string species;
  std::map<std::string, int> formula;  // element -> count
  int p = 2;
  int q = 3;
  Eigen::VectorXd w;
  double b = 0.0;
  std::vector<int> permutation;  // u'[i] = u[permutation[i]]; empty is identity

  void validate() const;
  double score(const Eigen::VectorXd& u) const;
};

// 1 iff w.u + b > 0.
bool fingerprint(const Eigen::VectorXd& u, const FingerprintModel& m);

std::vector<FingerprintModel> load_fingerprint_models(const std::string& path);
std::string default_fingerprint_path();

struct Frame {
  std::vector<std::string> symbols;
  std::vector<Eigen::Vector3d> positions;  // angstrom
  std::string comment;
};

std::vector<Frame> parse_xyz(const std::string& text);
std::vector<Frame> load_xyz(const std::string& path);

using Indicator = std::function<bool(const std::vector<Eigen::Vector3d>&, const std::vector<double>&)>;

Indicator model_indicator(const FingerprintModel& m);

struct SpeciesRule {
  std::string species;
  std::map<std::string, int> formula;
  Indicator indicator;
};

struct SpeciesRuleSet {
  std::vector<SpeciesRule> rules;
  // (container, contained): a contained candidate sharing an atom with a firing container candidate is dropped.
  std::vector<std::pair<std::string, std::string>> exclusions;
  std::int64_t candidate_cap = 1'000'000;
  std::int64_t search_cap = 10'000'000;
};

SpeciesRuleSet rules_from_models(const std::vector<FingerprintModel>& models);

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Firing atom subsets (sorted indices) of one rule after no exclusions.
std::vector<std::vector<int>> firing_candidates(const Frame& f, const SpeciesRule& rule, std::int64_t cap);

// Largest number of pairwise atom-disjoint sets.
int max_disjoint(const std::vector<std::vector<int>>& sets, std::int64_t search_cap);

std::map<std::string, int> species_counts(const Frame& f, const SpeciesRuleSet& rules);

std::vector<std::map<std::string, int>> classify_trajectory(const std::vector<Frame>& frames,
                                                            const SpeciesRuleSet& rules);

}  // namespace qdyn
