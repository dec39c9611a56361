#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "saa/problem.hpp"
#include "saa/solver.hpp"

namespace saa {

struct RegressionDataset {
  Eigen::MatrixXd x;  // N x d design rows
  Vec y;              // responses
  SeedLineage lineage;
  double q = 9.0;  // moment order the experiment assumes finite
  long long n() const { return x.rows(); }
  int dim() const { return static_cast<int>(x.cols()); }
};

// Experiment-level description of the regression family: standardized
// Student-t(nu) factors through a mixing map (diagonal scales by default;
// a full mixing matrix switches population moments to control-sample
// estimates), plus independent scaled Student-t noise.
struct LassoConfig {
  int d = 50;
  double design_dof = 12.0;  // nu; must exceed q
  double q = 9.0;
  Vec scales;                          // diagonal mixing
  Eigen::MatrixXd mixing;              // optional full mixing (overrides scales)
  Vec x_true;
  double noise_dof = 12.0;
  double noise_scale = 0.5;
  double delta = 0.1;
  double radius = -1.0;  // R; negative resolves to |D3 x_true|_1
  // Calibratable constants of the four events and the small-ball profile.
  double c0 = 2.0, c2 = 2.0, c3 = 1.0, phi = 0.25;
  double small_ball_u = 1.0;
};

// Per-sample-size instance: alpha, the population solution of the
// (1+alpha)R-ball problem, and the population noise moments.
struct LassoInstance {
  LassoConfig cfg;
  long long n = 0;
  double alpha = 0.0;
  double r = 0.0;             // resolved R
  Eigen::MatrixXd sigma;      // population design matrix
  Vec d3;                     // population D3 diagonal
  Vec x_star;
  Vec p_eps_x;                // P[eps(.) x(.)] = Sigma (x_true - x_star)
  double p_eps6 = 0.0;        // E eps^6
  double p_eps2 = 0.0;        // E eps^2
  bool moments_estimated = false;
  long long solver_iterations = 0;
};

// x = A z with z i.i.d. standardized Student-t(nu); y = <x_true, x> + noise.
// Rejects nu <= q.
RegressionDataset generate_design(const LassoConfig& cfg, long long n, SeedLineage lineage);

// l-th entry (mean |x[l]|^q)^{1/q} under the empirical measure.
Vec diag_matrix(const RegressionDataset& data, int q);
// population version; closed form for diagonal mixing, otherwise a control
// sample of >= 1e5 draws (estimated flag set on the instance).
Vec population_diag(const LassoConfig& cfg, int q);

// p-hat = min over sampled unit directions of the fraction of draws with
// |<v, x>| > u sqrt(<v, Sigma v>).
double small_ball_estimate(const LassoConfig& cfg, double u, int directions, long long draws,
                           std::uint64_t seed);

// Resolves alpha = C0 sqrt(ln(d/delta)/N), the population matrices, and the
// true solution x* of the (1+alpha)R-ball problem (Frank-Wolfe to gap 1e-10).
LassoInstance make_lasso_instance(const LassoConfig& cfg, long long n);

struct EventReport {
  bool norm_ok = false, diag_ok = false, grad_ok = false, quad_ok = false;
  double norm_margin = 0.0;   // (1+a)^2 R - |D3hat x*|_1
  double diag_margin = 0.0;   // min_l (Phat|x_l|^3 - (1+a)^{-3} P|x_l|^3)
  double grad_margin = 0.0;   // threshold - observed sup
  double quad_margin = 0.0;   // worst probe margin
  bool all() const { return norm_ok && diag_ok && grad_ok && quad_ok; }
};

// The four probabilistic events of the persistence proof, with worst margins;
// Quad is spot-checked on `budget` sampled directions plus all s-sparse
// canonical probes, s <= 3.
EventReport event_indicators(const LassoInstance& inst, const RegressionDataset& data,
                             long long budget, std::uint64_t seed);

// <(xh - x*), Sigma (xh - x*)> - 2 <P eps x, xh - x*>, the identity form of
// f(xh) - f(x*).
double excess_risk(const LassoInstance& inst, const Vec& x_hat);
// direct population risk difference, for identity cross-checks
double population_risk(const LassoInstance& inst, const Vec& x);

struct LassoTrialRow {
  long long trial = 0;
  int d = 0;
  long long n = 0;
  double r = 0.0, delta = 0.0, alpha = 0.0;
  bool norm_ok = false, diag_ok = false, grad_ok = false, quad_ok = false;
  bool feasible_ok = false;
  double excess_risk = 0.0;
  double bound_shape = 0.0;
  long long solver_iters = 0;
  bool solver_converged = true;
};

// One persistence trial: generate, solve the D3hat-ball problem at radius R, check
// feasibility |D3 xh|_1 <= (1+alpha)R and record the excess risk with the
// bound shape ((P+Phat) eps^6)^{1/6} R sqrt(ln(d/delta)/N) + R^2 ln(d/delta)/N.
LassoTrialRow persistence_trial(const LassoInstance& inst, std::uint64_t master_seed,
                                long long trial_index, double tol = 1e-9,
                                long long budget = 200'000);

// Pilot calibration: smallest constants with at most delta/8 pilot failure
// rate per event, validated margins; sets c0, c2, c3 and phi (from the
// small-ball estimate).
LassoConfig calibrate_constants(LassoConfig cfg, long long n_pilot, long long pilot_trials,
                                std::uint64_t seed);

// Reference configuration of the shipped persistence experiment.
LassoConfig reference_lasso_config();

}  // namespace saa
