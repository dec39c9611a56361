#pragma once

#include <vector>

#include "saa/entropy.hpp"
#include "saa/problem.hpp"

namespace saa {

// Tolerance for level-set equalities: membership in {f = level} is realized
// as |f - level| <= eta with eta = 1e-6 max(1, |f*|).
double level_eta(const PopulationOracle& oracle);

// Realize one of the paper's localized sets as a SetSpec. The membership
// oracle encodes the defining (in)equalities with the eta tolerance; the
// bounding ball comes from the oracle's level-radius when present (tight for
// strongly convex objectives), else from the hard set.
//   kind in {opt_level, constraint_level, ext_opt_level, ext_constraint_level,
//            int_opt_level, int_constraint_level, near_optimal, ext_relaxation}
// i is the constraint index for *_constraint_level kinds (ignored otherwise).
SetSpec localized_set_spec(const PopulationOracle& oracle, const StochasticProgram& program,
                           SetLabel kind, int i, double gamma);

struct VarianceProxyReport {
  std::vector<double> sigma_sq;      // sigma_i^2(x), population
  std::vector<double> sigma_hat_sq;  // sigma-hat_i^2(x), from the scenario set
  double v0_sq = 0.0;                // v_0^2(y, x)
  double vI_sq = 0.0;                // v_I^2(x) = sup_i {sigma-hat_i^2 + sigma_i^2}
  double sigma0_hat = 0.0;           // A1(sets[0]) sqrt(Lhat_0^2 + L_0^2)
  double sigmaI_hat = 0.0;           // sup_i A1(sets[i]) sqrt(Lhat_i^2 + L_i^2)
  std::vector<double> lip_pop;       // L_i
  std::vector<double> lip_emp;       // Lhat_i
  bool population_estimated = false; // population moments from a control sample
  A1Result a1_objective;
  std::vector<A1Result> a1_constraints;
};

// sets[0] localizes the objective; sets[1..m] the constraint sup. For m >= 1
// the constraint sets must all be present.
VarianceProxyReport variance_proxies(const StochasticProgram& program, const ScenarioSet& sample,
                                     const PopulationOracle& oracle, const Vec& x, const Vec& y,
                                     const std::vector<SetSpec>& sets, double gamma,
                                     EntropyMethod method = EntropyMethod::volumetric_bound,
                                     double a1_tol = 1e-6);

struct SampleSizeDetail {
  long long n = 0;
  double branch_tail = 0.0;     // (3/rho)^{1/(q-1)}
  double branch_variance = 0.0; // 4 C_q (1 + ln(3/rho)) / eps^2
  bool tail_binds = false;
  double c_q = 0.0;
};

// N >= max{ (3/rho)^{1/(q-1)}, 4 C_q [1 + ln(3/rho)] / eps^2 } with
// C_q = [L0^2 + c_q |L0^2 - E L0^2|_q] A1^2. c_q <= 0 selects the default 2q.
SampleSizeDetail sufficient_sample_size_detail(double q, double rho, double eps, double l0_sq,
                                               double centered_qnorm_l0sq, double a1,
                                               double c_q = -1.0);
long long sufficient_sample_size(double q, double rho, double eps, double l0_sq,
                                 double centered_qnorm_l0sq, double a1, double c_q = -1.0);

}  // namespace saa
