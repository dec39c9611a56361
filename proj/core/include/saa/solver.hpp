#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "saa/problem.hpp"

namespace saa {

struct SolveResult {
  Vec x;
  double objective = 0.0;
  double feasibility_residual = 0.0;
  double certificate = 0.0;  // optimality gap bound (duality gap / oracle gap)
  long long iterations = 0;
  bool converged = false;
};

struct GridResult {
  double value = 0.0;
  std::vector<Vec> argmins;     // all grid minimizers within eta of value
  double error_bound = 0.0;     // L * mesh * sqrt(d)
  long long points_scanned = 0;
  long long feasible_points = 0;
};

// Exhaustive scan of a box grid; d <= 3. Throws Errc::empty_set when no grid
// point passes the membership oracle.
GridResult brute_force_min(const std::function<double(const Vec&)>& objective,
                           const std::function<bool(const Vec&)>& member, const Vec& lo,
                           const Vec& hi, double mesh, double lipschitz = 0.0,
                           double eta = 1e-9);

// Switching-subgradient scheme for min F0-hat s.t. Fi-hat <= relaxation on Y.
// Steps on the most violated constraint when the residual exceeds tol_feas,
// else on the objective; returns the best productive iterate. The certificate
// is a cross-check against brute_force_min for d <= 3, else the usual
// D * L-hat / sqrt(k) bound.
SolveResult solve_saa(const StochasticProgram& program, const ScenarioSet& sample,
                      double tol_opt, double tol_feas, long long budget);

// Euclidean projection onto {x : sum_l w_l |x_l| <= R}; exact breakpoint scan.
Vec project_weighted_l1(const Vec& point, const Vec& weights, double radius);

// argmin over the weighted l1 ball of <gradient, v>: a signed scaled basis
// vector at the coordinate maximizing |g_l| / w_l (ties to the lowest index);
// the zero vector for a zero gradient.
Vec linear_min_weighted_l1(const Vec& gradient, const Vec& weights, double radius);

// Quadratic objective x'Q x - 2 b'x + c with Q symmetric PSD.
struct QuadraticModel {
  Eigen::MatrixXd Q;
  Vec b;
  double c = 0.0;
  double value(const Vec& x) const { return x.dot(Q * x) - 2.0 * b.dot(x) + c; }
  Vec gradient(const Vec& x) const { return 2.0 * (Q * x - b); }
};

// Frank-Wolfe with away steps and exact line search on the weighted l1 ball.
// Stops when the FW duality gap <= tol; iterates are convex combinations of
// ball vertices, so feasibility holds up to accumulation error.
SolveResult solve_quadratic_weighted_l1(const QuadraticModel& model, const Vec& weights,
                                        double radius, double tol, long long budget);

}  // namespace saa
