#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "saa/error.hpp"
#include "saa/geometry.hpp"
#include "saa/rng.hpp"

namespace saa {

using Scenario = Eigen::VectorXd;

struct SeedLineage {
  std::uint64_t experiment_seed = 0;
  std::uint64_t stream_id = 0;
};

// Draws one scenario; scenario j of a set is drawn from Variate(stream, j),
// so regeneration is bit-exact and order-independent.
using ScenarioSampler = std::function<Scenario(Variate&)>;

class ScenarioSet {
 public:
  static ScenarioSet generate(const ScenarioSampler& sampler, long long n, SeedLineage lineage);

  long long size() const { return data_.rows(); }
  int scenario_dim() const { return static_cast<int>(data_.cols()); }
  Scenario operator[](long long j) const { return data_.row(j).transpose(); }
  double component(long long j, int i) const { return data_(j, i); }
  SeedLineage lineage() const { return lineage_; }

 private:
  Eigen::MatrixXd data_;  // N x scenario_dim, row j = scenario j
  SeedLineage lineage_;
};

struct LossFunction {
  std::function<double(const Vec&, const Scenario&)> value;
  std::function<Vec(const Vec&, const Scenario&)> subgradient;
  // Lipschitz envelope L_i(xi): |F_i(x,xi)-F_i(y,xi)| <= L_i(xi)|x-y| on Y.
  std::function<double(const Scenario&)> lipschitz;
};

// Fast path for losses of the form F_i(x,xi) = xi[i] * g_i(x) with mean-one
// factors (so f_i = g_i). Empirical averages collapse to a single scalar per
// constraint, which the grid and coverage machinery depends on.
struct SeparableLoss {
  std::function<double(const Vec&)> g;
  std::function<Vec(const Vec&)> g_subgradient;
  double g_lipschitz = 0.0;  // Lip(g_i) on Y
};

class StochasticProgram {
 public:
  int dimension = 0;
  int num_constraints = 0;  // m; 0 allowed
  ConvexBody hard_set = ConvexBody::box(Vec::Zero(1), Vec::Ones(1));
  std::vector<LossFunction> losses;  // size m+1, index 0 = objective
  double relaxation = 0.0;           // eps-hat, may be negative
  ScenarioSampler sampler;
  std::vector<SeparableLoss> separable;  // empty, or size m+1

  bool is_separable() const { return !separable.empty(); }
  int loss_count() const { return num_constraints + 1; }
};

// F-hat evaluators for a fixed (program, sample) pair; exploits separability
// when available, otherwise averages pointwise.
class EmpiricalFunctions {
 public:
  EmpiricalFunctions(const StochasticProgram& program, const ScenarioSet& sample);

  double value(int i, const Vec& x) const;
  Vec subgradient(int i, const Vec& x) const;
  double lipschitz_sq(int i) const { return lip_sq_[i]; }      // P-hat L_i^2
  double lipschitz_mean(int i) const { return lip_mean_[i]; }  // P-hat L_i
  // Separable programs only: mean factor and P-hat (factor - 1)^2.
  double mean_factor(int i) const;
  double centered_sq_factor(int i) const;

  const StochasticProgram& program() const { return *program_; }
  const ScenarioSet& sample() const { return *sample_; }

 private:
  const StochasticProgram* program_;
  const ScenarioSet* sample_;
  std::vector<double> lip_sq_, lip_mean_;
  std::vector<double> mean_factor_, centered_sq_;  // separable only
};

// Two-sided enclosure of a minimum value; lo == hi for closed forms, a
// certified interval when the value comes from a grid scan.
struct MinBounds {
  double lo = 0.0;
  double hi = 0.0;
};

// Ground truth for a synthetic instance: closed-form population functions and
// whatever ingredients (metric regularity, Slater point, level radii, noise
// moments) the instance family can supply exactly.
class PopulationOracle {
 public:
  int dimension = 0;
  int num_constraints = 0;
  ConvexBody domain = ConvexBody::box(Vec::Zero(1), Vec::Ones(1));  // Y

  std::vector<std::function<double(const Vec&)>> f;        // size m+1
  std::vector<std::function<Vec(const Vec&)>> f_subgrad;   // size m+1
  double f_star = 0.0;  // = min_over_relaxed_bounds(0).hi
  Vec x_star;

  std::optional<double> mr_constant;     // metric regularity constant c
  std::optional<Vec> slater_point;       // x-bar with min_i(-f_i) > 0
  std::optional<std::function<Vec(const Vec&)>> project_feasible;  // onto X
  // r(gamma') with {x in X : f(x) <= f* + gamma'} contained in B(x*, r).
  std::optional<std::function<double(double)>> level_radius;

  // gamma -> enclosure of min over X_gamma of f; throws Errc::empty_set when
  // X_gamma has no witness at the oracle's resolution.
  std::function<MinBounds(double)> min_over_relaxed_bounds;
  double min_over_relaxed(double gamma) const { return min_over_relaxed_bounds(gamma).hi; }
  // gamma -> a minimizer over X_gamma (exact for closed-form oracles).
  std::optional<std::function<Vec(double)>> argmin_relaxed;

  // Population noise ingredients (separable families): Var(xi[i]), P L_i^2,
  // P L_i, and a flag telling whether they are closed-form or estimated.
  std::vector<double> factor_variance;
  std::vector<double> lipschitz_sq;    // L_i^2
  std::vector<double> lipschitz_mean;  // P L_i (deterministic Lipschitz bound of f_i)
  bool moments_estimated = false;

  int loss_count() const { return num_constraints + 1; }
  bool feasible(const Vec& x, double tol = 0.0) const;
};

// --- operations -----------------------------------------------------------

// (1/N) sum_j F_i(x, xi_j); rejects x outside Y and i out of range.
double empirical_value(const StochasticProgram& program, const ScenarioSet& sample, int i,
                       const Vec& x);

// max_i [f_i(x) - gamma]_+ ; zero iff x in X_gamma.
double feasibility_residual(const PopulationOracle& oracle, const Vec& x, double gamma);

// x in X_gamma and f(x) <= min_{X_gamma} f + eps.
bool near_optimal_membership(const PopulationOracle& oracle, const Vec& x, double eps,
                             double gamma);

// max over infeasible probes of dist(x,X) / max_i[f_i(x)]_+ ; lower bound on
// any admissible metric regularity constant. nullopt when every probe was
// feasible (no information).
std::optional<double> metric_regularity_estimate(const PopulationOracle& oracle,
                                                 const std::vector<Vec>& probes);

// min_i [-f_i(x-bar)]; positive iff x-bar strictly feasible.
double slater_slack(const PopulationOracle& oracle, const Vec& xbar);

// min_{X_{-gamma}} f - f*, nonnegative; gamma > 0.
double gap(const PopulationOracle& oracle, double gamma);

}  // namespace saa
