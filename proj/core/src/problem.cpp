#include "saa/problem.hpp"

#include <cmath>
#include <limits>

namespace saa {

ScenarioSet ScenarioSet::generate(const ScenarioSampler& sampler, long long n,
                                  SeedLineage lineage) {
  require(n >= 1, Errc::invalid_argument, "ScenarioSet: N must be >= 1");
  ScenarioSet set;
  set.lineage_ = lineage;
  RngStream stream(lineage.experiment_seed, lineage.stream_id);
  for (long long j = 0; j < n; ++j) {
    Variate v(stream, static_cast<std::uint64_t>(j));
    const Scenario xi = sampler(v);
    if (j == 0) set.data_.resize(n, xi.size());
    require(xi.size() == set.data_.cols(), Errc::invalid_argument,
            "ScenarioSet: inconsistent scenario dimension");
    set.data_.row(j) = xi.transpose();
  }
  return set;
}

EmpiricalFunctions::EmpiricalFunctions(const StochasticProgram& program, const ScenarioSet& sample)
    : program_(&program), sample_(&sample) {
  const int k = program.loss_count();
  const long long n = sample.size();
  lip_sq_.assign(k, 0.0);
  lip_mean_.assign(k, 0.0);
  if (program.is_separable()) {
    // the envelope is |factor| * Lip(g): moments reduce to factor moments
    mean_factor_.assign(k, 0.0);
    centered_sq_.assign(k, 0.0);
    for (int i = 0; i < k; ++i) {
      double sum = 0.0, sum_abs = 0.0, sum_sq = 0.0, sum_c = 0.0;
      for (long long j = 0; j < n; ++j) {
        const double f = sample.component(j, i);
        sum += f;
        sum_abs += std::abs(f);
        sum_sq += f * f;
        const double c = f - 1.0;
        sum_c += c * c;
      }
      mean_factor_[i] = sum / n;
      centered_sq_[i] = sum_c / n;
      const double lip = program.separable[i].g_lipschitz;
      lip_mean_[i] = sum_abs / n * lip;
      lip_sq_[i] = sum_sq / n * lip * lip;
    }
    return;
  }
  for (int i = 0; i < k; ++i) {
    for (long long j = 0; j < n; ++j) {
      const double l = program.losses[i].lipschitz(sample[j]);
      lip_sq_[i] += l * l;
      lip_mean_[i] += l;
    }
    lip_sq_[i] /= n;
    lip_mean_[i] /= n;
  }
}

double EmpiricalFunctions::value(int i, const Vec& x) const {
  if (program_->is_separable()) return mean_factor_[i] * program_->separable[i].g(x);
  const long long n = sample_->size();
  double s = 0.0;
  for (long long j = 0; j < n; ++j) s += program_->losses[i].value(x, (*sample_)[j]);
  return s / n;
}

Vec EmpiricalFunctions::subgradient(int i, const Vec& x) const {
  if (program_->is_separable())
    return mean_factor_[i] * program_->separable[i].g_subgradient(x);
  const long long n = sample_->size();
  Vec g = Vec::Zero(x.size());
  for (long long j = 0; j < n; ++j) g += program_->losses[i].subgradient(x, (*sample_)[j]);
  return g / n;
}

double EmpiricalFunctions::mean_factor(int i) const {
  require(program_->is_separable(), Errc::missing_ingredient, "mean_factor: not separable");
  return mean_factor_[i];
}

double EmpiricalFunctions::centered_sq_factor(int i) const {
  require(program_->is_separable(), Errc::missing_ingredient, "centered_sq_factor: not separable");
  return centered_sq_[i];
}

bool PopulationOracle::feasible(const Vec& x, double tol) const {
  if (!domain.contains(x, tol)) return false;
  for (int i = 1; i <= num_constraints; ++i)
    if (f[i](x) > tol) return false;
  return true;
}

double empirical_value(const StochasticProgram& program, const ScenarioSet& sample, int i,
                       const Vec& x) {
  require(i >= 0 && i <= program.num_constraints, Errc::index_out_of_range,
          "empirical_value: index out of range");
  require(program.hard_set.contains(x, 1e-12), Errc::outside_hard_set,
          "empirical_value: x outside hard set");
  const long long n = sample.size();
  double s = 0.0;
  for (long long j = 0; j < n; ++j) s += program.losses[i].value(x, sample[j]);
  return s / n;
}

double feasibility_residual(const PopulationOracle& oracle, const Vec& x, double gamma) {
  require(oracle.domain.contains(x, 1e-12), Errc::outside_hard_set,
          "feasibility_residual: x outside hard set");
  double worst = 0.0;
  for (int i = 1; i <= oracle.num_constraints; ++i)
    worst = std::max(worst, oracle.f[i](x) - gamma);
  return std::max(0.0, worst);
}

bool near_optimal_membership(const PopulationOracle& oracle, const Vec& x, double eps,
                             double gamma) {
  require(eps >= 0.0, Errc::invalid_argument, "near_optimal_membership: eps must be >= 0");
  double relaxed_min;
  try {
    relaxed_min = oracle.min_over_relaxed(gamma);
  } catch (const Error& e) {
    if (e.code() == Errc::empty_set)
      throw Error(Errc::infeasible_relaxation, "near_optimal_membership: X_gamma is empty");
    throw;
  }
  if (!oracle.domain.contains(x, 1e-12)) return false;
  if (feasibility_residual(oracle, x, gamma) > 0.0) return false;
  return oracle.f[0](x) <= relaxed_min + eps;
}

std::optional<double> metric_regularity_estimate(const PopulationOracle& oracle,
                                                 const std::vector<Vec>& probes) {
  require(oracle.project_feasible.has_value(), Errc::missing_ingredient,
          "metric_regularity_estimate: projection onto X required");
  bool saw_infeasible = false;
  double best = 0.0;
  for (const Vec& x : probes) {
    const double res = feasibility_residual(oracle, x, 0.0);
    if (res <= 0.0) continue;  // feasible probes carry no information
    saw_infeasible = true;
    const Vec p = (*oracle.project_feasible)(x);
    best = std::max(best, (x - p).norm() / res);
  }
  if (!saw_infeasible) return std::nullopt;
  return best;
}

double slater_slack(const PopulationOracle& oracle, const Vec& xbar) {
  require(oracle.num_constraints >= 1, Errc::no_constraints,
          "slater_slack: problem has no soft constraints");
  require(oracle.domain.contains(xbar, 1e-12), Errc::outside_hard_set,
          "slater_slack: x-bar outside hard set");
  double slack = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= oracle.num_constraints; ++i)
    slack = std::min(slack, -oracle.f[i](xbar));
  return slack;
}

double gap(const PopulationOracle& oracle, double gamma) {
  require(gamma > 0.0, Errc::invalid_argument, "gap: gamma must be > 0");
  double tightened_min;
  try {
    tightened_min = oracle.min_over_relaxed(-gamma);
  } catch (const Error& e) {
    if (e.code() == Errc::empty_set)
      throw Error(Errc::interior_relaxation_infeasible, "gap: X_{-gamma} is empty");
    throw;
  }
  return std::max(0.0, tightened_min - oracle.f_star);
}

}  // namespace saa
