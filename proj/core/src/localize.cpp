#include "saa/localize.hpp"

#include <cmath>

namespace saa {

double level_eta(const PopulationOracle& oracle) {
  return 1e-6 * std::max(1.0, std::abs(oracle.f_star));
}

namespace {

// Bounding ball for points whose optimality gap is at most `sublevel`; falls
// back to the hard set's ball when no level radius is available. `inflate`
// covers exterior approximations (points within c*gamma of X).
Ball level_ball(const PopulationOracle& oracle, double sublevel, double inflate, double eta) {
  const Ball domain_ball = oracle.domain.bounding_ball();
  if (!oracle.level_radius.has_value() || oracle.x_star.size() == 0)
    return Ball{domain_ball.center, domain_ball.radius + inflate};
  const double r = (*oracle.level_radius)(std::max(0.0, sublevel) + 2.0 * eta) + inflate + eta;
  if (r < domain_ball.radius + inflate) return Ball{oracle.x_star, r};
  return Ball{domain_ball.center, domain_ball.radius + inflate};
}

double dist_to_feasible(const PopulationOracle& oracle, const Vec& x) {
  require(oracle.project_feasible.has_value(), Errc::missing_ingredient,
          "localized set: projection onto X required for exterior kinds");
  return (x - (*oracle.project_feasible)(x)).norm();
}

}  // namespace

SetSpec localized_set_spec(const PopulationOracle& oracle, const StochasticProgram& program,
                           SetLabel kind, int i, double gamma) {
  (void)program;
  const double eta = level_eta(oracle);
  const double fstar = oracle.f_star;
  const int m = oracle.num_constraints;
  const bool needs_i = kind == SetLabel::constraint_level || kind == SetLabel::ext_constraint_level ||
                       kind == SetLabel::int_constraint_level;
  if (needs_i)
    require(i >= 1 && i <= m, Errc::index_out_of_range, "localized_set_spec: constraint index");

  // copies for capture
  const auto f0 = oracle.f[0];
  auto in_X = [&oracle, eta](const Vec& x) {
    if (!oracle.domain.contains(x, eta)) return false;
    for (int j = 1; j <= oracle.num_constraints; ++j)
      if (oracle.f[j](x) > eta) return false;
    return true;
  };

  SetSpec spec;
  spec.label = kind;
  spec.constraint_index = needs_i ? i : -1;
  spec.gamma = gamma;

  switch (kind) {
    case SetLabel::near_optimal: {
      spec.member = [in_X, f0, fstar, gamma, eta](const Vec& x) {
        return in_X(x) && f0(x) <= fstar + gamma + eta;
      };
      spec.bound = level_ball(oracle, gamma, 0.0, eta);
      if (oracle.x_star.size() > 0) spec.anchor = oracle.x_star;
      break;
    }
    case SetLabel::opt_level: {
      spec.member = [in_X, f0, fstar, gamma, eta](const Vec& x) {
        return in_X(x) && std::abs(f0(x) - fstar - gamma) <= eta;
      };
      spec.bound = level_ball(oracle, gamma, 0.0, eta);
      break;
    }
    case SetLabel::constraint_level: {
      const auto fi = oracle.f[i];
      spec.member = [in_X, f0, fi, fstar, gamma, eta](const Vec& x) {
        return in_X(x) && f0(x) <= fstar + gamma + eta && std::abs(fi(x)) <= eta;
      };
      spec.bound = level_ball(oracle, gamma, 0.0, eta);
      break;
    }
    case SetLabel::ext_opt_level:
    case SetLabel::ext_constraint_level: {
      require(oracle.mr_constant.has_value(), Errc::missing_ingredient,
              "localized_set_spec: exterior kinds need the metric regularity constant");
      const double c = *oracle.mr_constant;
      const double reach = c * std::max(0.0, gamma);
      const PopulationOracle* orc = &oracle;
      auto in_ext = [orc, reach, eta](const Vec& x) {
        return orc->domain.contains(x, eta) && dist_to_feasible(*orc, x) <= reach + eta;
      };
      // points project onto the sublevel set at gamma + Lip(f) * reach
      const double lip0 = oracle.lipschitz_mean.empty() ? 0.0 : oracle.lipschitz_mean[0];
      const double sublevel = gamma + lip0 * reach;
      if (kind == SetLabel::ext_opt_level) {
        spec.member = [in_ext, f0, fstar, gamma, eta](const Vec& x) {
          return in_ext(x) && std::abs(f0(x) - fstar - gamma) <= eta;
        };
      } else {
        const auto fi = oracle.f[i];
        spec.member = [in_ext, f0, fi, fstar, gamma, eta](const Vec& x) {
          return in_ext(x) && f0(x) <= fstar + gamma + eta && std::abs(fi(x) - gamma) <= eta;
        };
      }
      spec.bound = level_ball(oracle, sublevel, reach, eta);
      break;
    }
    case SetLabel::int_opt_level:
    case SetLabel::int_constraint_level: {
      const double g = gap(oracle, gamma);
      const double lvl = gamma + g;
      if (kind == SetLabel::int_opt_level) {
        spec.member = [in_X, f0, fstar, lvl, eta](const Vec& x) {
          return in_X(x) && std::abs(f0(x) - fstar - lvl) <= eta;
        };
      } else {
        const auto fi = oracle.f[i];
        spec.member = [in_X, f0, fi, fstar, lvl, eta](const Vec& x) {
          return in_X(x) && f0(x) <= fstar + lvl + eta && std::abs(fi(x)) <= eta;
        };
      }
      spec.bound = level_ball(oracle, lvl, 0.0, eta);
      break;
    }
    case SetLabel::ext_relaxation: {
      const PopulationOracle* orc = &oracle;
      const double reach = std::max(0.0, gamma);
      spec.member = [orc, reach, eta](const Vec& x) {
        return orc->domain.contains(x, eta) && dist_to_feasible(*orc, x) <= reach + eta;
      };
      const Ball db = oracle.domain.bounding_ball();
      spec.bound = Ball{db.center, db.radius};
      if (oracle.x_star.size() > 0) spec.anchor = oracle.x_star;
      break;
    }
    default:
      throw Error(Errc::unknown_kind, "localized_set_spec: unknown kind");
  }
  return spec;
}

namespace {

// Control-sample fallback for population variance ingredients.
constexpr int kControlSampleSize = 100'000;

std::vector<double> population_sigma_sq(const StochasticProgram& program,
                                        const PopulationOracle& oracle, const Vec& x,
                                        bool* estimated) {
  const int k = oracle.loss_count();
  std::vector<double> out(k, 0.0);
  if (!oracle.factor_variance.empty() && program.is_separable()) {
    for (int i = 0; i < k; ++i) {
      const double g = oracle.f[i](x);
      out[i] = oracle.factor_variance[i] * g * g;
    }
    return out;
  }
  *estimated = true;
  RngStream control(0x5eedc0470101ULL ^ 0, 12345);
  for (int j = 0; j < kControlSampleSize; ++j) {
    Variate v(control, j);
    const Scenario xi = program.sampler(v);
    for (int i = 0; i < k; ++i) {
      const double dev = program.losses[i].value(x, xi) - oracle.f[i](x);
      out[i] += dev * dev;
    }
  }
  for (double& o : out) o /= kControlSampleSize;
  return out;
}

}  // namespace

VarianceProxyReport variance_proxies(const StochasticProgram& program, const ScenarioSet& sample,
                                     const PopulationOracle& oracle, const Vec& x, const Vec& y,
                                     const std::vector<SetSpec>& sets, double gamma,
                                     EntropyMethod method, double a1_tol) {
  (void)gamma;
  const int k = oracle.loss_count();
  const int m = oracle.num_constraints;
  require(!sets.empty(), Errc::empty_set, "variance_proxies: objective set required");
  require(m == 0 || static_cast<int>(sets.size()) >= m + 1, Errc::empty_set,
          "variance_proxies: constraint sets required when m >= 1");

  VarianceProxyReport rep;
  rep.sigma_sq = population_sigma_sq(program, oracle, x, &rep.population_estimated);

  EmpiricalFunctions emp(program, sample);
  rep.sigma_hat_sq.assign(k, 0.0);
  const long long n = sample.size();
  for (int i = 0; i < k; ++i) {
    if (program.is_separable()) {
      const double g = oracle.f[i](x);
      rep.sigma_hat_sq[i] = emp.centered_sq_factor(i) * g * g;
    } else {
      double s = 0.0;
      for (long long j = 0; j < n; ++j) {
        const double dev = program.losses[i].value(x, sample[j]) - oracle.f[i](x);
        s += dev * dev;
      }
      rep.sigma_hat_sq[i] = s / n;
    }
  }

  // v0^2(y,x) = (P + P-hat) [F0(y,.) - F0(x,.) - (f0(y) - f0(x))]^2
  {
    const double pop_diff = oracle.f[0](y) - oracle.f[0](x);
    double emp_part = 0.0;
    if (program.is_separable()) {
      const double gd = program.separable[0].g(y) - program.separable[0].g(x);
      emp_part = emp.centered_sq_factor(0) * gd * gd;
    } else {
      for (long long j = 0; j < n; ++j) {
        const double dev = program.losses[0].value(y, sample[j]) -
                           program.losses[0].value(x, sample[j]) - pop_diff;
        emp_part += dev * dev;
      }
      emp_part /= n;
    }
    double pop_part = 0.0;
    if (!oracle.factor_variance.empty() && program.is_separable()) {
      const double gd = program.separable[0].g(y) - program.separable[0].g(x);
      pop_part = oracle.factor_variance[0] * gd * gd;
    } else {
      rep.population_estimated = true;
      RngStream control(0x5eedc0470101ULL ^ 1, 54321);
      for (int j = 0; j < kControlSampleSize; ++j) {
        Variate v(control, j);
        const Scenario xi = program.sampler(v);
        const double dev = program.losses[0].value(y, xi) - program.losses[0].value(x, xi) - pop_diff;
        pop_part += dev * dev;
      }
      pop_part /= kControlSampleSize;
    }
    rep.v0_sq = pop_part + emp_part;
  }

  rep.vI_sq = 0.0;
  for (int i = 1; i <= m; ++i)
    rep.vI_sq = std::max(rep.vI_sq, rep.sigma_hat_sq[i] + rep.sigma_sq[i]);

  rep.lip_pop.assign(k, 0.0);
  rep.lip_emp.assign(k, 0.0);
  for (int i = 0; i < k; ++i) {
    rep.lip_pop[i] = std::sqrt(oracle.lipschitz_sq[i]);
    rep.lip_emp[i] = std::sqrt(emp.lipschitz_sq(i));
  }

  rep.a1_objective = a1_functional(sets[0], method, a1_tol);
  rep.sigma0_hat = rep.a1_objective.value *
                   std::sqrt(emp.lipschitz_sq(0) + oracle.lipschitz_sq[0]);
  rep.sigmaI_hat = 0.0;
  for (int i = 1; i <= m; ++i) {
    A1Result a = a1_functional(sets[i], method, a1_tol);
    rep.a1_constraints.push_back(a);
    rep.sigmaI_hat = std::max(rep.sigmaI_hat,
                              a.value * std::sqrt(emp.lipschitz_sq(i) + oracle.lipschitz_sq[i]));
  }
  return rep;
}

SampleSizeDetail sufficient_sample_size_detail(double q, double rho, double eps, double l0_sq,
                                               double centered_qnorm_l0sq, double a1, double c_q) {
  require(q > 1.0, Errc::invalid_argument, "sufficient_sample_size: q must exceed 1");
  require(rho > 0.0 && rho <= 1.0, Errc::invalid_argument, "sufficient_sample_size: rho in (0,1]");
  require(eps > 0.0, Errc::invalid_argument, "sufficient_sample_size: eps must be > 0");
  SampleSizeDetail out;
  out.c_q = c_q > 0.0 ? c_q : 2.0 * q;
  const double cq_total = (l0_sq + out.c_q * centered_qnorm_l0sq) * a1 * a1;
  out.branch_tail = std::pow(3.0 / rho, 1.0 / (q - 1.0));
  out.branch_variance = 4.0 * cq_total * (1.0 + std::log(3.0 / rho)) / (eps * eps);
  out.tail_binds = out.branch_tail >= out.branch_variance;
  out.n = static_cast<long long>(std::ceil(std::max(out.branch_tail, out.branch_variance)));
  return out;
}

long long sufficient_sample_size(double q, double rho, double eps, double l0_sq,
                                 double centered_qnorm_l0sq, double a1, double c_q) {
  return sufficient_sample_size_detail(q, rho, eps, l0_sq, centered_qnorm_l0sq, a1, c_q).n;
}

}  // namespace saa
