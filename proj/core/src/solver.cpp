#include "saa/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace saa {

GridResult brute_force_min(const std::function<double(const Vec&)>& objective,
                           const std::function<bool(const Vec&)>& member, const Vec& lo,
                           const Vec& hi, double mesh, double lipschitz, double eta) {
  const int d = static_cast<int>(lo.size());
  require(d >= 1 && d <= 3, Errc::invalid_argument, "brute_force_min: d must be in 1..3");
  require(mesh > 0.0, Errc::invalid_argument, "brute_force_min: mesh must be > 0");

  std::vector<int> counts(d);
  long long total = 1;
  for (int k = 0; k < d; ++k) {
    counts[k] = std::max(1, static_cast<int>(std::floor((hi[k] - lo[k]) / mesh + 1e-12)) + 1);
    total *= counts[k];
  }
  require(total <= 40'000'000LL, Errc::invalid_argument, "brute_force_min: grid too large");

  GridResult out;
  out.points_scanned = total;
  out.error_bound = lipschitz * mesh * std::sqrt(static_cast<double>(d));
  double best = std::numeric_limits<double>::infinity();
  std::vector<long long> best_idx;

  Vec x(d);
  for (long long idx = 0; idx < total; ++idx) {
    long long rem = idx;
    for (int k = 0; k < d; ++k) {
      const int ik = static_cast<int>(rem % counts[k]);
      rem /= counts[k];
      x[k] = (counts[k] == 1) ? lo[k] : lo[k] + (hi[k] - lo[k]) * ik / (counts[k] - 1);
    }
    if (!member(x)) continue;
    ++out.feasible_points;
    const double v = objective(x);
    if (v < best) best = v;
  }
  if (out.feasible_points == 0) throw Error(Errc::empty_set, "brute_force_min: no feasible grid point");

  // second pass collects every argmin within eta of the minimum
  for (long long idx = 0; idx < total; ++idx) {
    long long rem = idx;
    for (int k = 0; k < d; ++k) {
      const int ik = static_cast<int>(rem % counts[k]);
      rem /= counts[k];
      x[k] = (counts[k] == 1) ? lo[k] : lo[k] + (hi[k] - lo[k]) * ik / (counts[k] - 1);
    }
    if (!member(x)) continue;
    if (objective(x) <= best + eta) out.argmins.push_back(x);
  }
  out.value = best;
  return out;
}

SolveResult solve_saa(const StochasticProgram& program, const ScenarioSet& sample,
                      double tol_opt, double tol_feas, long long budget) {
  require(tol_opt > 0.0 && tol_feas > 0.0, Errc::invalid_argument, "solve_saa: tolerances > 0");
  const int d = program.dimension;
  const int m = program.num_constraints;
  EmpiricalFunctions emp(program, sample);

  const double diam = program.hard_set.diameter();
  double lip_hat = 0.0;
  for (int i = 0; i <= m; ++i) lip_hat = std::max(lip_hat, std::sqrt(emp.lipschitz_sq(i)));
  const double step_scale = diam / std::max(lip_hat, 1e-12);

  Vec x = program.hard_set.bounding_ball().center;
  x = program.hard_set.project(x);
  Vec best_x = x;
  double best_obj = std::numeric_limits<double>::infinity();
  double best_res = std::numeric_limits<double>::infinity();
  long long k = 0;

  auto residual = [&](const Vec& z) {
    double worst = 0.0;
    for (int i = 1; i <= m; ++i) worst = std::max(worst, emp.value(i, z) - program.relaxation);
    return std::max(0.0, worst);
  };

  for (k = 1; k <= budget; ++k) {
    double res = 0.0;
    int violated = -1;
    for (int i = 1; i <= m; ++i) {
      const double v = emp.value(i, x) - program.relaxation;
      if (v > res) {
        res = v;
        violated = i;
      }
    }
    Vec g;
    if (violated >= 0 && res > tol_feas) {
      g = emp.subgradient(violated, x);
    } else {
      const double obj = emp.value(0, x);
      if (obj < best_obj || (res <= tol_feas && best_res > tol_feas)) {
        best_obj = obj;
        best_res = res;
        best_x = x;
      }
      g = emp.subgradient(0, x);
    }
    const double gn = g.norm();
    if (gn < 1e-15) break;  // stationary for the active piece
    const double step = step_scale / (gn * std::sqrt(static_cast<double>(k)));
    x = program.hard_set.project(x - step * g);
  }

  SolveResult out;
  out.x = best_x;
  out.objective = emp.value(0, best_x);
  out.feasibility_residual = residual(best_x);
  out.iterations = k > budget ? budget : k;

  if (d <= 3) {
    const double mesh = std::max(1e-4, program.hard_set.diameter() / 400.0);
    auto obj = [&](const Vec& z) { return emp.value(0, z); };
    auto member = [&](const Vec& z) {
      if (!program.hard_set.contains(z, 1e-12)) return false;
      for (int i = 1; i <= m; ++i)
        if (emp.value(i, z) > program.relaxation) return false;
      return true;
    };
    try {
      GridResult grid = brute_force_min(obj, member, program.hard_set.aabb_lo(),
                                        program.hard_set.aabb_hi(), mesh,
                                        std::sqrt(emp.lipschitz_sq(0)));
      out.certificate = std::max(0.0, out.objective - (grid.value - grid.error_bound));
    } catch (const Error&) {
      out.certificate = std::numeric_limits<double>::infinity();
    }
  } else {
    out.certificate = diam * lip_hat / std::sqrt(static_cast<double>(std::max<long long>(1, out.iterations)));
  }
  out.converged = out.certificate <= tol_opt && out.feasibility_residual <= tol_feas;
  return out;
}

Vec project_weighted_l1(const Vec& point, const Vec& weights, double radius) {
  const int d = static_cast<int>(point.size());
  require(weights.size() == d, Errc::invalid_argument, "project_weighted_l1: size mismatch");
  require(radius > 0.0, Errc::invalid_argument, "project_weighted_l1: radius must be > 0");
  for (int l = 0; l < d; ++l)
    require(weights[l] > 0.0, Errc::invalid_argument, "project_weighted_l1: weights must be > 0");

  double total = 0.0;
  for (int l = 0; l < d; ++l) total += weights[l] * std::abs(point[l]);
  if (total <= radius) return point;

  // x_l = sign(v_l) (|v_l| - lambda w_l)_+, with lambda solving
  // sum_l w_l (|v_l| - lambda w_l)_+ = R; breakpoints at |v_l| / w_l.
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> bp(d);
  for (int l = 0; l < d; ++l) bp[l] = std::abs(point[l]) / weights[l];
  std::sort(order.begin(), order.end(), [&](int a, int b) { return bp[a] < bp[b]; });

  double sum_wv = 0.0, sum_w2 = 0.0;  // over the active set {l : bp_l > lambda}
  for (int l = 0; l < d; ++l) {
    sum_wv += weights[l] * std::abs(point[l]);
    sum_w2 += weights[l] * weights[l];
  }
  double lambda = 0.0;
  double prev_bp = 0.0;
  for (int r = 0; r <= d; ++r) {
    const double seg_hi = (r < d) ? bp[order[r]] : std::numeric_limits<double>::infinity();
    if (sum_w2 > 0.0) {
      const double cand = (sum_wv - radius) / sum_w2;
      if (cand >= prev_bp - 1e-15 && cand <= seg_hi + 1e-15) {
        lambda = std::max(cand, 0.0);
        break;
      }
    }
    if (r < d) {
      const int l = order[r];
      sum_wv -= weights[l] * std::abs(point[l]);
      sum_w2 -= weights[l] * weights[l];
      prev_bp = bp[l];
    }
  }

  Vec x(d);
  for (int l = 0; l < d; ++l) {
    const double mag = std::abs(point[l]) - lambda * weights[l];
    x[l] = mag > 0.0 ? (point[l] > 0.0 ? mag : -mag) : 0.0;
  }
  return x;
}

Vec linear_min_weighted_l1(const Vec& gradient, const Vec& weights, double radius) {
  const int d = static_cast<int>(gradient.size());
  require(weights.size() == d, Errc::invalid_argument, "linear_min_weighted_l1: size mismatch");
  for (int l = 0; l < d; ++l)
    require(weights[l] > 0.0, Errc::invalid_argument, "linear_min_weighted_l1: weights must be > 0");
  int best = -1;
  double best_score = 0.0;
  for (int l = 0; l < d; ++l) {
    const double score = std::abs(gradient[l]) / weights[l];
    if (score > best_score) {
      best_score = score;
      best = l;
    }
  }
  Vec v = Vec::Zero(d);
  if (best < 0) return v;  // zero gradient: every feasible point is optimal
  v[best] = -radius * (gradient[best] > 0.0 ? 1.0 : -1.0) / weights[best];
  return v;
}

SolveResult solve_quadratic_weighted_l1(const QuadraticModel& model, const Vec& weights,
                                        double radius, double tol, long long budget) {
  const int d = static_cast<int>(weights.size());
  require(radius > 0.0 && tol > 0.0, Errc::invalid_argument,
          "solve_quadratic_weighted_l1: radius and tol must be > 0");

  // Vertex v_s for signed coordinate s in {+-1..+-d}: sign(s) R / w_|s| e_|s|.
  auto vertex = [&](int s) {
    Vec v = Vec::Zero(d);
    const int l = std::abs(s) - 1;
    v[l] = (s > 0 ? radius : -radius) / weights[l];
    return v;
  };

  SolveResult out;
  Vec x = Vec::Zero(d);
  Vec g = model.gradient(x);
  if (g.norm() < 1e-300) {  // zero gradient at the origin: x = 0 optimal
    out.x = x;
    out.objective = model.value(x);
    out.converged = true;
    return out;
  }

  // active set: signed index -> convex weight
  std::vector<double> lam(2 * d + 1, 0.0);
  auto lam_at = [&](int s) -> double& { return lam[s + d]; };
  {
    Vec s0 = linear_min_weighted_l1(g, weights, radius);
    int sgn = 0;
    for (int l = 0; l < d; ++l)
      if (s0[l] != 0.0) sgn = (s0[l] > 0.0 ? l + 1 : -(l + 1));
    if (sgn == 0) sgn = 1;
    lam_at(sgn) = 1.0;
    x = vertex(sgn);
  }

  double fw_gap = std::numeric_limits<double>::infinity();
  long long k = 0;
  for (k = 1; k <= budget; ++k) {
    g = model.gradient(x);
    // FW vertex
    int s_fw = 0;
    double best_score = 0.0;
    for (int l = 0; l < d; ++l) {
      const double score = std::abs(g[l]) / weights[l];
      if (score > best_score) {
        best_score = score;
        s_fw = g[l] > 0.0 ? -(l + 1) : (l + 1);
      }
    }
    const Vec s_dir = s_fw == 0 ? Vec(Vec::Zero(d)) : vertex(s_fw);
    fw_gap = g.dot(x - s_dir);
    if (fw_gap <= tol) break;

    // away vertex: active vertex with the largest <g, v>
    int s_away = 0;
    double away_score = -std::numeric_limits<double>::infinity();
    for (int s = -d; s <= d; ++s) {
      if (s == 0 || lam_at(s) <= 0.0) continue;
      const int l = std::abs(s) - 1;
      const double gv = (s > 0 ? radius : -radius) / weights[l] * g[l];
      if (gv > away_score) {
        away_score = gv;
        s_away = s;
      }
    }

    const bool use_fw = s_away == 0 || g.dot(x - s_dir) >= away_score - g.dot(x);
    Vec dir;
    double step_max;
    if (use_fw) {
      dir = s_dir - x;
      step_max = 1.0;
    } else {
      dir = x - vertex(s_away);
      const double la = lam_at(s_away);
      step_max = std::min(la / (1.0 - la + 1e-300), 1e12);
    }
    if (dir.norm() < 1e-14) break;
    const double curv = dir.dot(model.Q * dir);
    double step = step_max;
    if (curv > 0.0) step = std::clamp(-g.dot(dir) / (2.0 * curv), 0.0, step_max);
    if (step <= 0.0) break;

    if (use_fw) {
      for (int s = -d; s <= d; ++s)
        if (s != 0) lam_at(s) *= (1.0 - step);
      lam_at(s_fw) += step;
    } else {
      for (int s = -d; s <= d; ++s)
        if (s != 0) lam_at(s) *= (1.0 + step);
      lam_at(s_away) -= step;
      if (lam_at(s_away) < 1e-15) lam_at(s_away) = 0.0;
    }
    // renormalize and rebuild x from vertices to keep feasibility exact
    double tot = 0.0;
    for (int s = -d; s <= d; ++s)
      if (s != 0) tot += lam_at(s);
    x = Vec::Zero(d);
    for (int s = -d; s <= d; ++s) {
      if (s == 0 || lam_at(s) <= 0.0) continue;
      lam_at(s) /= tot;
      x += lam_at(s) * vertex(s);
    }
  }

  out.x = x;
  out.objective = model.value(x);
  out.certificate = std::max(fw_gap, 0.0);
  double wl1 = 0.0;
  for (int l = 0; l < d; ++l) wl1 += weights[l] * std::abs(x[l]);
  out.feasibility_residual = std::max(0.0, wl1 - radius);
  out.iterations = std::min(k, budget);
  out.converged = fw_gap <= tol;
  return out;
}

}  // namespace saa
