#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "saa/concentration.hpp"
#include "saa/instances.hpp"
#include "saa/localize.hpp"

namespace saa {

enum class ExperimentKind {
  fixed_set_coverage,
  exterior_mr_coverage,
  interior_scq_coverage,
  interior_solution_coverage,
  perturbation_soundness,
  concentration_suite,
  lasso_persistence,
};
std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct EpsilonPolicy {
  enum class Mode { paper_formula, fixed } mode = Mode::paper_formula;
  // paper_formula: the tolerance scale the localized sets are evaluated at
  // (eps_ref for Theorems 3-4, the tolerance eps for Theorem 5 / Corollary 4).
  // fixed: eps-hat (resp. eps) itself.
  double value = 0.05;
};

struct ExperimentConfig {
  int schema_version = 1;
  ExperimentKind kind = ExperimentKind::fixed_set_coverage;
  std::string instance_ref;  // builtin:<name> or descriptor path
  std::vector<long long> n_schedule;
  double rho = 0.1;  // rho for coverage kinds, delta for lasso
  EpsilonPolicy eps_policy;
  long long trials = 500;
  std::uint64_t master_seed = 1;
  int workers = 1;
  std::string output_dir = "runs/out";
  nlohmann::json extra;  // kind-specific knobs, echoed into the manifest
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);

// Spec-level coverage summary for a batch of conclusion verdicts: frequency,
// 95% Wilson interval, and the pass flag (Wilson lower bound of the failure
// rate at most rho). Single-verdict batches are flagged low-power.
struct CoverageSummary {
  long long trials = 0;
  long long held = 0;
  double frequency = 0.0;
  WilsonInterval interval;
  bool pass = false;
  bool low_power = false;
};
CoverageSummary coverage(const std::vector<bool>& verdicts, double rho);

struct RunResult {
  int exit_code = 0;  // 0 ok, 2 config error, 3 acceptance failure
  bool all_pass = false;
  std::string out_dir;
  std::string message;
};

RunResult run_experiment(const ExperimentConfig& config);
RunResult run_experiment_file(const std::string& config_path, const std::string& out_override = "",
                              int workers_override = -1);

// Recomputes summary.csv from trials.csv and compares byte-for-byte.
bool verify_run(const std::string& run_dir, std::string* message);

struct SampleSizeCell {
  double q = 0.0, rho = 0.0, eps = 0.0;
  SampleSizeDetail detail;
};

// Tabulates the sufficient-sample-size formula over the grids; the instance
// supplies L0^2, the centered q-norm of L0^2, and A1 of the localized target
// set at 2 eps.
std::vector<SampleSizeCell> sample_size_table(const std::vector<double>& qs,
                                              const std::vector<double>& rhos,
                                              const std::vector<double>& epss,
                                              const Instance& instance);

// locale-independent shortest round-trip formatting used by every CSV writer
std::string format_double(double v);

// work-stealing over trial indices; results must be written by index
void parallel_for(long long count, int workers, const std::function<void(long long)>& body);

}  // namespace saa
