#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "saa/entropy.hpp"
#include "saa/localize.hpp"
#include "saa/problem.hpp"

namespace saa {

// Pointwise function deviations between F-hat and f.
struct DeviationReport {
  double delta_pair = 0.0;        // delta-hat(y, x)
  double Delta_pair = 0.0;        // Delta-hat(y, x)
  std::vector<double> delta_i;    // delta-hat_i(x), i = 1..m
  std::vector<double> Delta_i;    // Delta-hat_i(x)
};

DeviationReport deviation_quantities(const PopulationOracle& oracle,
                                     const StochasticProgram& program, const ScenarioSet& sample,
                                     const Vec& x, const Vec& y);

enum class SupKind {
  fixed_delta_t,     // sup { t - (Fhat(z) - Fhat(x_ref)) }          (Theorem 1)
  delta_pair,        // sup Delta-hat(z, x_ref)                       (Delta-hat_{0,gamma}, corollaries)
  constraint_gap,    // sup { level - Fhat_i(z) }                     (Delta-hat_{i,gamma})
  constraint_delta,  // sup Delta-hat_i(z)                            (corollary constraint premise)
};

struct SupParams {
  Vec x_ref;                      // reference point of pair deviations
  Vec origin;                     // strictly-below point the ray sampler shoots from
  double level = 0.0;             // t for fixed_delta_t; gamma for constraint_gap
  int constraint = 0;             // i for constraint kinds
  bool apply_empirical_cap = false;  // intersect with X-hat and {Fhat <= Fhat(y_cap) + t1}
  Vec y_cap;
  double t1 = 0.0;
  SeedLineage sampling;           // direction stream
};

struct SupValue {
  std::string name;
  double sampled = 0.0;  // 0-or-sup convention; lower bound on the true sup
  std::optional<Vec> witness;
  double certified_upper = 0.0;  // +inf unless a grid certification ran
  long long budget_used = 0;
  bool empty_set = false;
};

// Sampled lower bound on the sup of the kind's integrand over the set
// (boundary bisection along rays from params.origin plus rejection samples);
// monotone in budget.
SupValue sup_deviation(const PopulationOracle& oracle, const StochasticProgram& program,
                       const ScenarioSet& sample, const SetSpec& set, const SupParams& params,
                       SupKind kind, long long budget);

// Cached population and empirical values on a box grid (d <= 3): the engine
// behind certified premise checks and counterexample searches.
class GridStudy {
 public:
  GridStudy(const PopulationOracle& oracle, const StochasticProgram& program,
            const ScenarioSet& sample, int points_per_axis);

  long long size() const { return static_cast<long long>(pop_[0].size()); }
  Vec point(long long idx) const;
  double pop(int i, long long idx) const { return pop_[i][idx]; }
  double emp(int i, long long idx) const { return emp_[i][idx]; }
  double cover() const { return cover_; }
  double lip_pop(int i) const { return lip_pop_[i]; }
  double lip_emp(int i) const { return lip_emp_[i]; }
  double emp_at(int i, const Vec& x) const;

  // enclosure of min Fhat over X-hat = {Fhat_i <= relaxation}
  MinBounds empirical_min() const;

  const PopulationOracle& oracle() const { return *oracle_; }
  const StochasticProgram& program() const { return *program_; }
  const ScenarioSet& sample() const { return *sample_; }

 private:
  const PopulationOracle* oracle_;
  const StochasticProgram* program_;
  const ScenarioSet* sample_;
  std::unique_ptr<EmpiricalFunctions> emp_fns_;
  Vec lo_, hi_;
  std::vector<int> counts_;
  double cover_ = 0.0;
  std::vector<std::vector<double>> pop_, emp_;
  std::vector<double> lip_pop_, lip_emp_;
};

struct ConditionParameters {
  double t = 0.0, t0 = 0.0, t1 = 0.0, t2 = 0.0, gamma = 0.0;
  Vec x_star, y_star;
};

struct TargetSpec {
  enum class Kind {
    near_optimal_relaxed,  // x in X_gamma and f(x) <= min_{X_gamma} f + level
    exterior,              // dist(x, X) <= radius and f(x) <= f* + level
  };
  Kind kind = Kind::near_optimal_relaxed;
  double gamma = 0.0;
  double level = 0.0;
  double radius = 0.0;
};

struct InclusionResult {
  bool holds = true;
  std::optional<Vec> counterexample;
  long long candidates = 0;  // certain members of X-hat*_{t1} examined
};

enum class CheckMethod { sampled, grid };

struct ConditionReport {
  std::string instance_id;
  std::string which;  // c0 | c1c2c3 | exterior-MR | interior-SCQ | interior-solution
  bool premise_invalid = false;
  std::string invalid_reason;
  std::optional<bool> c0, c1, c2, c3;
  bool premises_hold = false;
  std::vector<SupValue> sups;
  double t1 = 0.0;       // empirical near-optimality level of the conclusion
  TargetSpec target;
  double eps_hat = 0.0;  // relaxation echoed
  std::optional<bool> conclusion_ok;
  std::optional<Vec> counterexample;
};

// Theorem 1 (fixed constraints, m = 0): C0: t1 <= t - Delta-hat(x*|t);
// conclusion X-hat*_{t1} in X*_t.
ConditionReport check_c0(const PopulationOracle& oracle, const StochasticProgram& program,
                         const ScenarioSet& sample, const Vec& x_star, double t, double t1,
                         long long budget, CheckMethod method = CheckMethod::grid,
                         const GridStudy* grid = nullptr);

// Theorem 2 (perturbed constraints): conditions C1-C3; conclusion
// X-hat*_{t1} in (X_gamma)*_{t+t2}.
ConditionReport check_c1_c2_c3(const PopulationOracle& oracle, const StochasticProgram& program,
                               const ScenarioSet& sample, const ConditionParameters& params,
                               long long budget, CheckMethod method = CheckMethod::grid,
                               const GridStudy* grid = nullptr);

enum class CorollaryKind { exterior_mr, interior_scq, interior_solution };

// Corollaries 1-3 premise bundles and conclusions; eps plays the role of
// eps-hat for exterior_mr and of the tolerance for the interior kinds.
ConditionReport check_corollary(const PopulationOracle& oracle, const StochasticProgram& program,
                                const ScenarioSet& sample, CorollaryKind which, double eps,
                                long long budget, CheckMethod method = CheckMethod::grid,
                                const GridStudy* grid = nullptr);

// Searches for a certain counterexample x-hat in X-hat*_{t1} violating the
// target; conservative about discretization, so a reported witness is a real
// violation.
InclusionResult inclusion_check(const PopulationOracle& oracle, const StochasticProgram& program,
                                const ScenarioSet& sample, double t1, const TargetSpec& target,
                                long long budget, const GridStudy* grid = nullptr);

}  // namespace saa
