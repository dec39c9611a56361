#include "saa/lasso.hpp"

#include <algorithm>
#include <cmath>

namespace saa {

namespace {

// even absolute moments of the standardized t(nu): m2 = 1, m4, m6
double t_std_m4(double nu) { return 3.0 * (nu - 2.0) / (nu - 4.0); }
double t_std_m6(double nu) { return 15.0 * (nu - 2.0) * (nu - 2.0) / ((nu - 4.0) * (nu - 6.0)); }

// E[(sum_i X_i)^6] for independent symmetric X_i given per-component even
// moments (m2_i, m4_i, m6_i): partitions (6), (4,2), (2,2,2).
double sixth_moment_of_sum(const std::vector<double>& m2, const std::vector<double>& m4,
                           const std::vector<double>& m6) {
  const std::size_t k = m2.size();
  double s_w = 0.0, s_u = 0.0, s_u2 = 0.0, s_u3 = 0.0, s_v = 0.0, s_vu = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    s_w += m6[i];
    s_u += m2[i];
    s_u2 += m2[i] * m2[i];
    s_u3 += m2[i] * m2[i] * m2[i];
    s_v += m4[i];
    s_vu += m4[i] * m2[i];
  }
  const double e3 = (s_u * s_u * s_u - 3.0 * s_u * s_u2 + 2.0 * s_u3) / 6.0;
  return s_w + 15.0 * (s_v * s_u - s_vu) + 90.0 * e3;
}

bool has_full_mixing(const LassoConfig& cfg) { return cfg.mixing.size() > 0; }

Vec design_row(const LassoConfig& cfg, Variate& v) {
  Vec z(cfg.d);
  for (int k = 0; k < cfg.d; ++k) z[k] = v.student_t_std(cfg.design_dof);
  if (has_full_mixing(cfg)) return cfg.mixing * z;
  return cfg.scales.cwiseProduct(z);
}

Eigen::MatrixXd population_sigma(const LassoConfig& cfg) {
  if (has_full_mixing(cfg)) return cfg.mixing * cfg.mixing.transpose();
  return Vec(cfg.scales.array().square()).asDiagonal();
}

constexpr long long kControlDraws = 100'000;

}  // namespace

RegressionDataset generate_design(const LassoConfig& cfg, long long n, SeedLineage lineage) {
  require(cfg.design_dof > cfg.q, Errc::invalid_argument,
          "generate_design: design dof must exceed the moment order q");
  require(n >= 1 && cfg.d >= 1, Errc::invalid_argument, "generate_design: bad sizes");
  RegressionDataset data;
  data.lineage = lineage;
  data.q = cfg.q;
  data.x.resize(n, cfg.d);
  data.y.resize(n);
  RngStream stream(lineage.experiment_seed, lineage.stream_id);
  for (long long j = 0; j < n; ++j) {
    Variate v(stream, static_cast<std::uint64_t>(j));
    const Vec row = design_row(cfg, v);
    data.x.row(j) = row.transpose();
    data.y[j] = cfg.x_true.dot(row) + cfg.noise_scale * v.student_t_std(cfg.noise_dof);
  }
  return data;
}

Vec diag_matrix(const RegressionDataset& data, int q) {
  require(q == 2 || q == 3, Errc::invalid_argument, "diag_matrix: q must be 2 or 3");
  const long long n = data.n();
  Vec out(data.dim());
  for (int l = 0; l < data.dim(); ++l) {
    double s = 0.0;
    for (long long j = 0; j < n; ++j) s += std::pow(std::abs(data.x(j, l)), q);
    out[l] = std::pow(s / n, 1.0 / q);
  }
  return out;
}

Vec population_diag(const LassoConfig& cfg, int q) {
  require(q == 2 || q == 3, Errc::invalid_argument, "population_diag: q must be 2 or 3");
  if (!has_full_mixing(cfg)) {
    const double abs_q = student_t_std_abs_moment(cfg.design_dof, q);
    return Vec(cfg.scales.array().abs() * std::pow(abs_q, 1.0 / q));
  }
  // control-sample estimate for general mixing
  Vec acc = Vec::Zero(cfg.d);
  RngStream stream(0xd1a6c0411ULL, 7);
  for (long long j = 0; j < kControlDraws; ++j) {
    Variate v(stream, j);
    const Vec row = design_row(cfg, v);
    for (int l = 0; l < cfg.d; ++l) acc[l] += std::pow(std::abs(row[l]), q);
  }
  return Vec((acc / kControlDraws).array().pow(1.0 / q));
}

double small_ball_estimate(const LassoConfig& cfg, double u, int directions, long long draws,
                           std::uint64_t seed) {
  require(u > 0.0 && directions >= 1 && draws >= 1, Errc::invalid_argument,
          "small_ball_estimate: bad inputs");
  const Eigen::MatrixXd sigma = population_sigma(cfg);
  std::vector<Vec> rows;
  rows.reserve(draws);
  RngStream dstream(seed, 0xd0a7ULL);
  for (long long j = 0; j < draws; ++j) {
    Variate v(dstream, j);
    rows.push_back(design_row(cfg, v));
  }
  RngStream vstream(seed, 0xd1aULL);
  double p_min = 1.0;
  for (int r = 0; r < directions; ++r) {
    Variate v(vstream, r);
    Vec dir(cfg.d);
    for (int k = 0; k < cfg.d; ++k) dir[k] = v.normal();
    const double nn = dir.norm();
    if (nn < 1e-12) continue;
    dir /= nn;
    const double scale = std::sqrt(dir.dot(sigma * dir));
    if (scale < 1e-14) continue;  // degenerate direction; skip
    long long hits = 0;
    for (const Vec& row : rows)
      if (std::abs(dir.dot(row)) > u * scale) ++hits;
    p_min = std::min(p_min, static_cast<double>(hits) / draws);
  }
  return p_min;
}

LassoInstance make_lasso_instance(const LassoConfig& cfg, long long n) {
  LassoInstance inst;
  inst.cfg = cfg;
  inst.n = n;
  inst.sigma = population_sigma(cfg);
  inst.d3 = population_diag(cfg, 3);
  inst.moments_estimated = has_full_mixing(cfg);
  inst.r = cfg.radius > 0.0 ? cfg.radius : inst.d3.cwiseAbs().dot(cfg.x_true.cwiseAbs());
  const double logterm = std::log(cfg.d / cfg.delta);
  inst.alpha = cfg.c0 * std::sqrt(logterm / static_cast<double>(n));

  // x* = argmin of the population risk over the (1+alpha)R ball of D3
  QuadraticModel pop;
  pop.Q = inst.sigma;
  pop.b = inst.sigma * cfg.x_true;
  pop.c = cfg.x_true.dot(inst.sigma * cfg.x_true);  // + noise variance, irrelevant to argmin
  SolveResult sr =
      solve_quadratic_weighted_l1(pop, inst.d3, (1.0 + inst.alpha) * inst.r, 1e-10, 2'000'000);
  require(sr.converged, Errc::solver_failure, "make_lasso_instance: population solve failed");
  inst.x_star = sr.x;
  inst.solver_iterations = sr.iterations;
  inst.p_eps_x = inst.sigma * (cfg.x_true - inst.x_star);

  // eps = <x_true - x*, x> + noise: independent symmetric components
  const Vec w = cfg.x_true - inst.x_star;
  if (!has_full_mixing(cfg)) {
    const double m4 = t_std_m4(cfg.design_dof), m6 = t_std_m6(cfg.design_dof);
    std::vector<double> c2, c4, c6;
    for (int l = 0; l < cfg.d; ++l) {
      const double a = w[l] * cfg.scales[l];
      c2.push_back(a * a);
      c4.push_back(a * a * a * a * m4);
      c6.push_back(std::pow(a, 6.0) * m6);
    }
    const double ns = cfg.noise_scale;
    c2.push_back(ns * ns);
    c4.push_back(std::pow(ns, 4.0) * t_std_m4(cfg.noise_dof));
    c6.push_back(std::pow(ns, 6.0) * t_std_m6(cfg.noise_dof));
    inst.p_eps6 = sixth_moment_of_sum(c2, c4, c6);
    inst.p_eps2 = w.dot(inst.sigma * w) + ns * ns;
  } else {
    // control-sample moments, flagged as estimates
    RngStream stream(0xe5717a7eULL, 11);
    double m6 = 0.0, m2 = 0.0;
    for (long long j = 0; j < kControlDraws; ++j) {
      Variate v(stream, j);
      const Vec row = design_row(cfg, v);
      const double eps = w.dot(row) + cfg.noise_scale * v.student_t_std(cfg.noise_dof);
      m2 += eps * eps;
      m6 += std::pow(eps, 6.0);
    }
    inst.p_eps6 = m6 / kControlDraws;
    inst.p_eps2 = m2 / kControlDraws;
    inst.moments_estimated = true;
  }
  return inst;
}

EventReport event_indicators(const LassoInstance& inst, const RegressionDataset& data,
                             long long budget, std::uint64_t seed) {
  require(inst.x_star.size() == inst.cfg.d, Errc::missing_ingredient,
          "event_indicators: x* missing (make_lasso_instance first)");
  const LassoConfig& cfg = inst.cfg;
  const long long n = data.n();
  const int d = cfg.d;
  const double logterm = std::log(cfg.d / cfg.delta);
  const double rate = logterm / static_cast<double>(n);
  EventReport rep;

  const Vec d3_hat = diag_matrix(data, 3);

  // Norm: |D3hat x*|_1 <= (1+alpha)^2 R
  {
    const double lhs = d3_hat.cwiseAbs().dot(inst.x_star.cwiseAbs());
    const double rhs = (1.0 + inst.alpha) * (1.0 + inst.alpha) * inst.r;
    rep.norm_margin = rhs - lhs;
    rep.norm_ok = lhs <= rhs;
  }

  // Diag: Phat |x_l|^3 >= (1+alpha)^{-3} P |x_l|^3 for every l
  {
    const double shrink = std::pow(1.0 + inst.alpha, -3.0);
    double worst = std::numeric_limits<double>::infinity();
    for (int l = 0; l < d; ++l) {
      const double emp3 = std::pow(d3_hat[l], 3.0);
      const double pop3 = std::pow(inst.d3[l], 3.0);
      worst = std::min(worst, emp3 - shrink * pop3);
    }
    rep.diag_margin = worst;
    rep.diag_ok = worst >= 0.0;
  }

  // Grad: |D3hat^{-1} (P - Phat) eps x|_inf <= C2 sqrt(rate) ((P+Phat) eps^6)^{1/6}
  {
    Vec emp_eps_x = Vec::Zero(d);
    double emp_eps6 = 0.0;
    for (long long j = 0; j < n; ++j) {
      const double eps = data.y[j] - inst.x_star.dot(data.x.row(j).transpose());
      emp_eps_x += eps * data.x.row(j).transpose();
      emp_eps6 += std::pow(eps, 6.0);
    }
    emp_eps_x /= static_cast<double>(n);
    emp_eps6 /= static_cast<double>(n);
    double sup = 0.0;
    for (int l = 0; l < d; ++l)
      sup = std::max(sup, std::abs(inst.p_eps_x[l] - emp_eps_x[l]) / d3_hat[l]);
    const double rhs = cfg.c2 * std::sqrt(rate) * std::pow(inst.p_eps6 + emp_eps6, 1.0 / 6.0);
    rep.grad_margin = rhs - sup;
    rep.grad_ok = sup <= rhs;
  }

  // Quad: <v, Sigma-hat v> >= phi <v, Sigma v> - C3 rate |D3hat v|_1 over
  // sampled directions and all s-sparse canonical probes, s <= 3
  {
    const Eigen::MatrixXd sigma_hat = data.x.transpose() * data.x / static_cast<double>(n);
    double worst = std::numeric_limits<double>::infinity();
    auto probe = [&](const Vec& v) {
      const double lhs = v.dot(sigma_hat * v);
      const double rhs = cfg.phi * v.dot(inst.sigma * v) - cfg.c3 * rate * d3_hat.cwiseAbs().dot(v.cwiseAbs());
      worst = std::min(worst, lhs - rhs);
    };
    Vec v = Vec::Zero(d);
    for (int a = 0; a < d; ++a) {
      v.setZero();
      v[a] = 1.0;
      probe(v);
    }
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b)
        for (double sb : {1.0, -1.0}) {
          v.setZero();
          v[a] = 1.0;
          v[b] = sb;
          probe(v);
        }
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b)
        for (int c = b + 1; c < d; ++c)
          for (double sb : {1.0, -1.0})
            for (double sc : {1.0, -1.0}) {
              v.setZero();
              v[a] = 1.0;
              v[b] = sb;
              v[c] = sc;
              probe(v);
            }
    RngStream stream(seed, 0x95adULL);
    for (long long r = 0; r < budget; ++r) {
      Variate var(stream, r);
      for (int k = 0; k < d; ++k) v[k] = var.normal();
      const double nn = v.norm();
      if (nn < 1e-12) continue;
      v /= nn;
      probe(v);
    }
    rep.quad_margin = worst;
    rep.quad_ok = worst >= 0.0;
  }
  return rep;
}

double excess_risk(const LassoInstance& inst, const Vec& x_hat) {
  const Vec h = x_hat - inst.x_star;
  return h.dot(inst.sigma * h) - 2.0 * inst.p_eps_x.dot(h);
}

double population_risk(const LassoInstance& inst, const Vec& x) {
  const Vec h = x - inst.cfg.x_true;
  return h.dot(inst.sigma * h) + inst.p_eps2 -
         (inst.cfg.x_true - inst.x_star).dot(inst.sigma * (inst.cfg.x_true - inst.x_star));
}

LassoTrialRow persistence_trial(const LassoInstance& inst, std::uint64_t master_seed,
                                long long trial_index, double tol, long long budget) {
  const LassoConfig& cfg = inst.cfg;
  require(inst.alpha <= 0.5, Errc::invalid_argument, "persistence_trial: alpha must be <= 1/2");
  const double n_floor = std::pow(1.0 / cfg.delta, 1.0 / (cfg.q / 6.0 - 1.0));
  require(static_cast<double>(inst.n) >= n_floor, Errc::invalid_argument,
          "persistence_trial: N below the (1/delta)^{1/(q/6 - 1)} floor");

  LassoTrialRow row;
  row.trial = trial_index;
  row.d = cfg.d;
  row.n = inst.n;
  row.r = inst.r;
  row.delta = cfg.delta;
  row.alpha = inst.alpha;

  const RegressionDataset data =
      generate_design(cfg, inst.n, SeedLineage{master_seed, static_cast<std::uint64_t>(trial_index)});
  const Vec d3_hat = diag_matrix(data, 3);

  QuadraticModel emp;
  emp.Q = data.x.transpose() * data.x / static_cast<double>(inst.n);
  emp.b = data.x.transpose() * data.y / static_cast<double>(inst.n);
  emp.c = data.y.squaredNorm() / static_cast<double>(inst.n);
  const SolveResult sr = solve_quadratic_weighted_l1(emp, d3_hat, inst.r, tol, budget);
  row.solver_iters = sr.iterations;
  row.solver_converged = sr.converged;

  const double feas = inst.d3.cwiseAbs().dot(sr.x.cwiseAbs());
  row.feasible_ok = feas <= (1.0 + inst.alpha) * inst.r;
  row.excess_risk = excess_risk(inst, sr.x);

  double emp_eps6 = 0.0;
  for (long long j = 0; j < inst.n; ++j) {
    const double eps = data.y[j] - inst.x_star.dot(data.x.row(j).transpose());
    emp_eps6 += std::pow(eps, 6.0);
  }
  emp_eps6 /= static_cast<double>(inst.n);
  const double rate = std::log(cfg.d / cfg.delta) / static_cast<double>(inst.n);
  row.bound_shape = std::pow(inst.p_eps6 + emp_eps6, 1.0 / 6.0) * inst.r * std::sqrt(rate) +
                    inst.r * inst.r * rate;

  const EventReport ev = event_indicators(inst, data, 64, master_seed ^ 0xe7e47ULL);
  row.norm_ok = ev.norm_ok;
  row.diag_ok = ev.diag_ok;
  row.grad_ok = ev.grad_ok;
  row.quad_ok = ev.quad_ok;
  return row;
}

LassoConfig calibrate_constants(LassoConfig cfg, long long n_pilot, long long pilot_trials,
                                std::uint64_t seed) {
  require(pilot_trials >= 50, Errc::invalid_argument, "calibrate_constants: need >= 50 trials");
  cfg.phi = std::min(1.0, cfg.small_ball_u * cfg.small_ball_u *
                              small_ball_estimate(cfg, cfg.small_ball_u, 64, 20'000, seed) / 2.0);

  const long long allowed = static_cast<long long>(std::floor(cfg.delta / 8.0 * pilot_trials));
  const double logterm = std::log(cfg.d / cfg.delta);
  const double rate = logterm / static_cast<double>(n_pilot);

  // C0 governs Norm and Diag through alpha; smallest grid value with at most
  // `allowed` pilot failures for both events.
  const std::vector<double> c0_grid = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0};
  double chosen_c0 = c0_grid.back();
  for (double c0 : c0_grid) {
    if (c0 * std::sqrt(rate) > 0.5) break;  // alpha cap
    LassoConfig trial_cfg = cfg;
    trial_cfg.c0 = c0;
    LassoInstance inst = make_lasso_instance(trial_cfg, n_pilot);
    long long norm_fail = 0, diag_fail = 0;
    for (long long t = 0; t < pilot_trials; ++t) {
      const RegressionDataset data =
          generate_design(cfg, n_pilot, SeedLineage{seed ^ 0xca11b7a7eULL, static_cast<std::uint64_t>(t)});
      const EventReport ev = event_indicators(inst, data, 8, seed ^ t);
      if (!ev.norm_ok) ++norm_fail;
      if (!ev.diag_ok) ++diag_fail;
    }
    if (norm_fail <= allowed && diag_fail <= allowed) {
      chosen_c0 = c0;
      break;
    }
  }
  cfg.c0 = chosen_c0;

  // C2, C3: (1 - delta/8)-quantile of the realized event ratios, inflated 5%.
  LassoInstance inst = make_lasso_instance(cfg, n_pilot);
  std::vector<double> grad_ratio, quad_ratio;
  for (long long t = 0; t < pilot_trials; ++t) {
    const RegressionDataset data =
        generate_design(cfg, n_pilot, SeedLineage{seed ^ 0xca11b7a7eULL, static_cast<std::uint64_t>(t)});
    const Vec d3_hat = diag_matrix(data, 3);
    Vec emp_eps_x = Vec::Zero(cfg.d);
    double emp_eps6 = 0.0;
    for (long long j = 0; j < n_pilot; ++j) {
      const double eps = data.y[j] - inst.x_star.dot(data.x.row(j).transpose());
      emp_eps_x += eps * data.x.row(j).transpose();
      emp_eps6 += std::pow(eps, 6.0);
    }
    emp_eps_x /= static_cast<double>(n_pilot);
    emp_eps6 /= static_cast<double>(n_pilot);
    double sup = 0.0;
    for (int l = 0; l < cfg.d; ++l)
      sup = std::max(sup, std::abs(inst.p_eps_x[l] - emp_eps_x[l]) / d3_hat[l]);
    grad_ratio.push_back(sup / (std::sqrt(rate) * std::pow(inst.p_eps6 + emp_eps6, 1.0 / 6.0)));

    const Eigen::MatrixXd sigma_hat = data.x.transpose() * data.x / static_cast<double>(n_pilot);
    double worst = 0.0;
    RngStream stream(seed ^ 0x99ULL, t);
    Vec v(cfg.d);
    for (int r = 0; r < 32; ++r) {
      Variate var(stream, r);
      for (int k = 0; k < cfg.d; ++k) v[k] = var.normal();
      v /= v.norm();
      const double deficit = cfg.phi * v.dot(inst.sigma * v) - v.dot(sigma_hat * v);
      const double weight = rate * d3_hat.cwiseAbs().dot(v.cwiseAbs());
      if (weight > 1e-14) worst = std::max(worst, deficit / weight);
    }
    for (int a = 0; a < cfg.d; ++a) {
      v.setZero();
      v[a] = 1.0;
      const double deficit = cfg.phi * v.dot(inst.sigma * v) - sigma_hat(a, a);
      const double weight = rate * d3_hat[a];
      if (weight > 1e-14) worst = std::max(worst, deficit / weight);
    }
    quad_ratio.push_back(worst);
  }
  auto quantile = [&](std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t k =
        std::min(xs.size() - 1, static_cast<std::size_t>(std::ceil((1.0 - cfg.delta / 8.0) * xs.size())));
    return xs[k];
  };
  cfg.c2 = std::max(0.1, 1.05 * quantile(grad_ratio));
  cfg.c3 = std::max(0.1, 1.05 * quantile(quad_ratio));
  return cfg;
}

LassoConfig reference_lasso_config() {
  LassoConfig cfg;
  cfg.d = 50;
  cfg.design_dof = 12.0;
  cfg.q = 9.0;
  cfg.scales.resize(cfg.d);
  for (int l = 0; l < cfg.d; ++l) cfg.scales[l] = 0.6 + 0.1 * (l % 11);
  cfg.x_true = Vec::Zero(cfg.d);
  cfg.x_true[3] = 1.5;
  cfg.x_true[17] = -2.0;
  cfg.x_true[29] = 1.0;
  cfg.x_true[41] = 0.8;
  cfg.noise_dof = 12.0;
  cfg.noise_scale = 0.5;
  cfg.delta = 0.1;
  cfg.radius = -1.0;
  // constants from the shipped calibration run (pilot N = 500, 200 trials)
  cfg.c0 = 1.0;
  cfg.c2 = 2.0;
  cfg.c3 = 1.0;
  cfg.phi = 0.25;
  return cfg;
}

}  // namespace saa
