#include "saa/deviation.hpp"

#include <cmath>
#include <limits>

#include "saa/solver.hpp"

namespace saa {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

DeviationReport deviation_quantities(const PopulationOracle& oracle,
                                     const StochasticProgram& program, const ScenarioSet& sample,
                                     const Vec& x, const Vec& y) {
  EmpiricalFunctions emp(program, sample);
  DeviationReport rep;
  const double pop_diff = oracle.f[0](y) - oracle.f[0](x);
  const double emp_diff = emp.value(0, y) - emp.value(0, x);
  rep.delta_pair = std::max(0.0, emp_diff - pop_diff);
  rep.Delta_pair = std::max(0.0, pop_diff - emp_diff);
  for (int i = 1; i <= oracle.num_constraints; ++i) {
    const double fi = oracle.f[i](x);
    const double Fi = emp.value(i, x);
    rep.delta_i.push_back(std::max(0.0, Fi - fi));
    rep.Delta_i.push_back(std::max(0.0, fi - Fi));
  }
  return rep;
}

// --- GridStudy --------------------------------------------------------------

GridStudy::GridStudy(const PopulationOracle& oracle, const StochasticProgram& program,
                     const ScenarioSet& sample, int points_per_axis)
    : oracle_(&oracle), program_(&program), sample_(&sample) {
  require(program.hard_set.kind() == ConvexBody::Kind::box, Errc::invalid_argument,
          "GridStudy: box hard sets only");
  const int d = program.dimension;
  require(d >= 1 && d <= 3, Errc::invalid_argument, "GridStudy: d must be in 1..3");
  require(points_per_axis >= 2, Errc::invalid_argument, "GridStudy: need >= 2 points per axis");
  emp_fns_ = std::make_unique<EmpiricalFunctions>(program, sample);
  lo_ = program.hard_set.aabb_lo();
  hi_ = program.hard_set.aabb_hi();
  counts_.assign(d, points_per_axis);
  long long total = 1;
  double cover_sq = 0.0;
  for (int k = 0; k < d; ++k) {
    total *= counts_[k];
    const double m = (hi_[k] - lo_[k]) / (counts_[k] - 1);
    cover_sq += m * m;
  }
  cover_ = 0.5 * std::sqrt(cover_sq);
  require(total <= 20'000'000LL, Errc::invalid_argument, "GridStudy: grid too large");

  const int kf = oracle.loss_count();
  pop_.assign(kf, std::vector<double>(total));
  emp_.assign(kf, std::vector<double>(total));
  const bool sep = program.is_separable();
  for (long long idx = 0; idx < total; ++idx) {
    const Vec x = point(idx);
    for (int i = 0; i < kf; ++i) {
      if (sep) {
        const double g = program.separable[i].g(x);
        pop_[i][idx] = g;  // mean-one factors: f_i = g_i
        emp_[i][idx] = emp_fns_->mean_factor(i) * g;
      } else {
        pop_[i][idx] = oracle.f[i](x);
        emp_[i][idx] = emp_fns_->value(i, x);
      }
    }
  }
  lip_pop_ = oracle.lipschitz_mean;
  lip_emp_.assign(kf, 0.0);
  for (int i = 0; i < kf; ++i) lip_emp_[i] = emp_fns_->lipschitz_mean(i);
}

Vec GridStudy::point(long long idx) const {
  const int d = static_cast<int>(counts_.size());
  Vec x(d);
  long long rem = idx;
  for (int k = 0; k < d; ++k) {
    const int ik = static_cast<int>(rem % counts_[k]);
    rem /= counts_[k];
    x[k] = lo_[k] + (hi_[k] - lo_[k]) * ik / (counts_[k] - 1);
  }
  return x;
}

double GridStudy::emp_at(int i, const Vec& x) const { return emp_fns_->value(i, x); }

MinBounds GridStudy::empirical_min() const {
  const long long total = size();
  const int m = program_->num_constraints;
  const double eps_hat = program_->relaxation;
  double exact_min = kInf, inflated_min = kInf;
  for (long long idx = 0; idx < total; ++idx) {
    bool exact_ok = true, inflated_ok = true;
    for (int i = 1; i <= m && inflated_ok; ++i) {
      const double v = emp_[i][idx];
      if (v > eps_hat) exact_ok = false;
      if (v > eps_hat + lip_emp_[i] * cover_) inflated_ok = false;
    }
    if (!inflated_ok) continue;
    const double v0 = emp_[0][idx];
    if (v0 < inflated_min) inflated_min = v0;
    if (exact_ok && v0 < exact_min) exact_min = v0;
  }
  if (!std::isfinite(exact_min))
    throw Error(Errc::empty_set, "GridStudy: empirical feasible set has no grid witness");
  return MinBounds{inflated_min - lip_emp_[0] * cover_, exact_min};
}

// --- sampled sup ------------------------------------------------------------

namespace {

// largest s >= 0 with origin + s dir still inside the body and the ball
double ray_exit(const ConvexBody& y, const Ball& ball, const Vec& o, const Vec& dir) {
  double s_max = kInf;
  if (y.kind() == ConvexBody::Kind::box) {
    for (int k = 0; k < o.size(); ++k) {
      if (std::abs(dir[k]) < 1e-300) continue;
      const double a = (y.aabb_lo()[k] - o[k]) / dir[k];
      const double b = (y.aabb_hi()[k] - o[k]) / dir[k];
      s_max = std::min(s_max, std::max(a, b));
    }
  } else {
    const Vec w = o - y.bounding_ball().center;
    const double r = y.bounding_ball().radius;
    const double bb = w.dot(dir), cc = w.squaredNorm() - r * r;
    const double disc = bb * bb - cc;
    s_max = std::min(s_max, disc <= 0.0 ? 0.0 : -bb + std::sqrt(disc));
  }
  if (ball.radius > 0.0 && ball.center.size() == o.size()) {
    const Vec w = o - ball.center;
    const double bb = w.dot(dir), cc = w.squaredNorm() - ball.radius * ball.radius;
    const double disc = bb * bb - cc;
    s_max = std::min(s_max, disc <= 0.0 ? 0.0 : -bb + std::sqrt(disc));
  }
  return std::max(0.0, s_max);
}

}  // namespace

SupValue sup_deviation(const PopulationOracle& oracle, const StochasticProgram& program,
                       const ScenarioSet& sample, const SetSpec& set, const SupParams& params,
                       SupKind kind, long long budget) {
  require(budget >= 1, Errc::invalid_argument, "sup_deviation: budget must be >= 1");
  EmpiricalFunctions emp(program, sample);
  const int ci = params.constraint;
  const bool constraint_kind = kind == SupKind::constraint_gap || kind == SupKind::constraint_delta;
  if (constraint_kind)
    require(ci >= 1 && ci <= oracle.num_constraints, Errc::index_out_of_range,
            "sup_deviation: constraint index");

  auto phi = [&](const Vec& z) { return constraint_kind ? oracle.f[ci](z) : oracle.f[0](z); };
  const double fx_ref_emp = params.x_ref.size() > 0 ? emp.value(0, params.x_ref) : 0.0;
  const double fx_ref_pop = params.x_ref.size() > 0 ? oracle.f[0](params.x_ref) : 0.0;
  const double cap_level =
      params.apply_empirical_cap ? emp.value(0, params.y_cap) + params.t1 : kInf;

  auto integrand = [&](const Vec& z) {
    switch (kind) {
      case SupKind::fixed_delta_t:
        return params.t - (emp.value(0, z) - fx_ref_emp);
      case SupKind::delta_pair:
        return std::max(0.0, (oracle.f[0](z) - fx_ref_pop) - (emp.value(0, z) - fx_ref_emp));
      case SupKind::constraint_gap:
        return params.level - emp.value(ci, z);
      case SupKind::constraint_delta:
        return std::max(0.0, oracle.f[ci](z) - emp.value(ci, z));
    }
    return 0.0;
  };

  SupValue out;
  out.name = constraint_kind ? "sup_i" + std::to_string(ci) : "sup_0";
  out.budget_used = budget;
  out.empty_set = true;
  double best = -kInf;

  const Vec& o = params.origin;
  require(o.size() == program.dimension, Errc::invalid_argument, "sup_deviation: origin required");
  const double level = params.level;
  RngStream dirs(params.sampling.experiment_seed, params.sampling.stream_id);
  const int d = program.dimension;

  const double phi_o = phi(o);
  for (long long c = 0; c < budget; ++c) {
    Variate v(dirs, static_cast<std::uint64_t>(c));
    Vec dir(d);
    for (int k = 0; k < d; ++k) dir[k] = v.normal();
    const double n = dir.norm();
    if (n < 1e-12) continue;
    dir /= n;

    if (phi_o >= level) continue;  // origin must start strictly below the level
    const double s_max = ray_exit(program.hard_set, set.bound, o, dir);
    if (s_max <= 0.0) continue;
    if (phi(o + s_max * dir) < level) continue;  // no crossing along this ray
    double lo_s = 0.0, hi_s = s_max;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo_s + hi_s);
      if (phi(o + mid * dir) < level)
        lo_s = mid;
      else
        hi_s = mid;
    }
    const Vec z = o + 0.5 * (lo_s + hi_s) * dir;
    if (!set.member(z)) continue;
    if (params.apply_empirical_cap) {
      bool ok = emp.value(0, z) <= cap_level;
      for (int i = 1; i <= oracle.num_constraints && ok; ++i)
        ok = emp.value(i, z) <= program.relaxation;
      if (!ok) continue;
    }
    const double val = integrand(z);
    out.empty_set = false;
    if (val > best) {
      best = val;
      out.witness = z;
    }
  }
  out.sampled = out.empty_set ? 0.0 : std::max(0.0, best);
  out.certified_upper = kInf;
  return out;
}

// --- certified premise machinery --------------------------------------------

namespace {

struct CertSup {
  double upper = 0.0;   // certified 0-or-sup upper bound
  double grid_max = -kInf;
  bool empty = true;
  long long witness = -1;
};

// Population inequality/equality constraints on grid values, each inflated by
// its function's Lipschitz slack, plus optional empirical caps.
struct GridSetDef {
  // pop(i) <= bound
  std::vector<std::pair<int, double>> pop_le;
  // |pop(i) - level| <= eta, with level an interval [lo, hi]
  struct Level {
    int i;
    double lo, hi, eta;
  };
  std::vector<Level> pop_eq;
  std::vector<std::pair<int, double>> emp_le;
  bool need_dist = false;  // dist(z, X) <= dist_bound
  double dist_bound = 0.0;
};

template <class Integrand>
CertSup certified_sup(const GridStudy& g, const GridSetDef& def, Integrand integrand,
                      double lip_integrand, double eta) {
  const PopulationOracle& o = g.oracle();
  CertSup out;
  const long long total = g.size();
  for (long long idx = 0; idx < total; ++idx) {
    bool ok = true;
    for (const auto& [i, bound] : def.pop_le) {
      if (g.pop(i, idx) > bound + g.lip_pop(i) * g.cover() + eta) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    for (const auto& lv : def.pop_eq) {
      const double s = g.lip_pop(lv.i) * g.cover();
      const double v = g.pop(lv.i, idx);
      if (v < lv.lo - lv.eta - s || v > lv.hi + lv.eta + s) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    for (const auto& [i, bound] : def.emp_le) {
      if (g.emp(i, idx) > bound + g.lip_emp(i) * g.cover() + eta) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (def.need_dist) {
      require(o.project_feasible.has_value(), Errc::missing_ingredient,
              "certified_sup: projection onto X required");
      const Vec z = g.point(idx);
      if ((z - (*o.project_feasible)(z)).norm() > def.dist_bound + g.cover() + eta) continue;
    }
    const double val = integrand(idx);
    out.empty = false;
    if (val > out.grid_max) {
      out.grid_max = val;
      out.witness = idx;
    }
  }
  out.upper = out.empty ? 0.0 : std::max(0.0, out.grid_max + lip_integrand * g.cover());
  return out;
}

std::unique_ptr<GridStudy> default_grid(const PopulationOracle& oracle,
                                        const StochasticProgram& program,
                                        const ScenarioSet& sample) {
  const int per_axis = program.dimension == 1 ? 4001 : (program.dimension == 2 ? 201 : 41);
  return std::make_unique<GridStudy>(oracle, program, sample, per_axis);
}

}  // namespace

// --- condition checks -------------------------------------------------------

ConditionReport check_c0(const PopulationOracle& oracle, const StochasticProgram& program,
                         const ScenarioSet& sample, const Vec& x_star, double t, double t1,
                         long long budget, CheckMethod method, const GridStudy* grid) {
  require(t > 0.0, Errc::invalid_argument, "check_c0: t must be > 0");
  require(program.num_constraints == 0, Errc::invalid_argument, "check_c0: fixed constraints only");
  ConditionReport rep;
  rep.which = "c0";
  rep.t1 = t1;
  rep.eps_hat = program.relaxation;
  rep.target = TargetSpec{TargetSpec::Kind::near_optimal_relaxed, 0.0, t, 0.0};

  const double eta = level_eta(oracle);
  const MinBounds b0 = oracle.min_over_relaxed_bounds(0.0);

  double upper = kInf;
  std::unique_ptr<GridStudy> own;
  if (method == CheckMethod::grid) {
    if (!grid) {
      own = default_grid(oracle, program, sample);
      grid = own.get();
    }
    const double fx_emp = grid->emp_at(0, x_star);
    GridSetDef def;
    def.pop_eq.push_back({0, b0.lo + t, b0.hi + t, eta});
    CertSup cs = certified_sup(
        *grid, def, [&](long long idx) { return t - (grid->emp(0, idx) - fx_emp); },
        grid->lip_emp(0), eta);
    upper = cs.upper;
    SupValue sv;
    sv.name = "Delta(x*|t)";
    sv.sampled = cs.empty ? 0.0 : std::max(0.0, cs.grid_max);
    sv.certified_upper = upper;
    sv.empty_set = cs.empty;
    if (cs.witness >= 0) sv.witness = grid->point(cs.witness);
    rep.sups.push_back(std::move(sv));
  }
  if (method == CheckMethod::sampled || budget > 0) {
    SetSpec set = localized_set_spec(oracle, program, SetLabel::opt_level, 0, t);
    SupParams sp;
    sp.x_ref = x_star;
    sp.origin = x_star;
    sp.level = oracle.f_star + t;
    sp.t = t;
    sp.sampling = sample.lineage();
    sp.sampling.stream_id ^= 0xd1a0ULL;
    SupValue sv = sup_deviation(oracle, program, sample, set, sp, SupKind::fixed_delta_t,
                                std::max<long long>(budget, 1000));
    sv.name = "Delta(x*|t) sampled";
    if (method == CheckMethod::sampled) upper = sv.sampled;
    rep.sups.push_back(std::move(sv));
  }

  rep.c0 = t1 <= t - upper;
  rep.premises_hold = *rep.c0;
  return rep;
}

ConditionReport check_c1_c2_c3(const PopulationOracle& oracle, const StochasticProgram& program,
                               const ScenarioSet& sample, const ConditionParameters& p,
                               long long budget, CheckMethod method, const GridStudy* grid) {
  ConditionReport rep;
  rep.which = "c1c2c3";
  rep.t1 = p.t1;
  rep.eps_hat = program.relaxation;
  const int m = oracle.num_constraints;
  require(m >= 1, Errc::no_constraints, "check_c1_c2_c3: perturbed constraints require m >= 1");

  auto invalid = [&](const std::string& why) {
    rep.premise_invalid = true;
    rep.invalid_reason = why;
    return rep;
  };
  if (!(p.t1 > 0.0 && p.t >= p.t0 && p.gamma >= 0.0 && p.t0 >= 0.0 && p.t2 >= 0.0))
    return invalid("parameter domain: need t1 > 0, t >= t0, gamma >= 0, t0, t2 >= 0");

  const double eta = level_eta(oracle);
  const double eps_hat = program.relaxation;
  MinBounds bg;
  try {
    bg = oracle.min_over_relaxed_bounds(p.gamma);
  } catch (const Error& e) {
    if (e.code() == Errc::empty_set) return invalid("X_gamma empty");
    throw;
  }
  rep.target = TargetSpec{TargetSpec::Kind::near_optimal_relaxed, p.gamma, p.t + p.t2, 0.0};

  // witness preconditions, certified conservatively
  for (int i = 1; i <= m; ++i) {
    if (oracle.f[i](p.x_star) > p.gamma + 1e-12) return invalid("x* not in X_gamma");
    if (oracle.f[i](p.y_star) > p.gamma + 1e-12) return invalid("y* not in X_gamma");
    if (!(oracle.f[i](p.y_star) < eps_hat)) return invalid("f_i(y*) < eps-hat fails");
  }
  if (oracle.f[0](p.x_star) > bg.lo + p.t2) return invalid("x* not certainly in (X_gamma)*_{t2}");
  if (oracle.f[0](p.y_star) > oracle.f[0](p.x_star) + p.t0) return invalid("f(y*) <= f(x*) + t0 fails");

  EmpiricalFunctions emp(program, sample);
  const double delta_yx = std::max(
      0.0, (emp.value(0, p.y_star) - emp.value(0, p.x_star)) -
               (oracle.f[0](p.y_star) - oracle.f[0](p.x_star)));

  // C3 first (exact)
  bool c3 = true;
  for (int i = 1; i <= m; ++i) {
    const double di = std::max(0.0, emp.value(i, p.y_star) - oracle.f[i](p.y_star));
    if (!(di < eps_hat - oracle.f[i](p.y_star))) c3 = false;
  }
  rep.c3 = c3;

  std::unique_ptr<GridStudy> own;
  if (method == CheckMethod::grid && !grid) {
    own = default_grid(oracle, program, sample);
    grid = own.get();
  }

  const double fy_emp = emp.value(0, p.y_star);
  const double fx_emp = emp.value(0, p.x_star);
  const double fx_pop = oracle.f[0](p.x_star);
  const double lvl = p.t + p.t2;

  double sup0 = kInf;
  std::vector<double> supi(m + 1, kInf);
  if (method == CheckMethod::grid) {
    GridSetDef base;
    for (int i = 1; i <= m; ++i) {
      base.pop_le.push_back({i, p.gamma});
      base.emp_le.push_back({i, eps_hat});
    }
    base.emp_le.push_back({0, fy_emp + p.t1});

    GridSetDef def0 = base;
    def0.pop_eq.push_back({0, bg.lo + lvl, bg.hi + lvl, eta});
    CertSup cs0 = certified_sup(
        *grid, def0,
        [&](long long idx) {
          return std::max(0.0, (grid->pop(0, idx) - fx_pop) - (grid->emp(0, idx) - fx_emp));
        },
        grid->lip_pop(0) + grid->lip_emp(0), eta);
    sup0 = cs0.upper;
    SupValue sv0;
    sv0.name = "Delta_{0,gamma}";
    sv0.sampled = cs0.empty ? 0.0 : std::max(0.0, cs0.grid_max);
    sv0.certified_upper = sup0;
    sv0.empty_set = cs0.empty;
    if (cs0.witness >= 0) sv0.witness = grid->point(cs0.witness);
    rep.sups.push_back(std::move(sv0));

    for (int i = 1; i <= m; ++i) {
      GridSetDef defi = base;
      defi.pop_le.push_back({0, bg.hi + lvl});
      defi.pop_eq.push_back({i, p.gamma, p.gamma, eta});
      CertSup csi = certified_sup(
          *grid, defi, [&](long long idx) { return p.gamma - grid->emp(i, idx); },
          grid->lip_emp(i), eta);
      supi[i] = csi.upper;
      SupValue svi;
      svi.name = "Delta_{" + std::to_string(i) + ",gamma}";
      svi.sampled = csi.empty ? 0.0 : std::max(0.0, csi.grid_max);
      svi.certified_upper = csi.upper;
      svi.empty_set = csi.empty;
      if (csi.witness >= 0) svi.witness = grid->point(csi.witness);
      rep.sups.push_back(std::move(svi));
    }
  } else {
    // sampled lower bounds stand in for the certified uppers
    const Vec origin = oracle.argmin_relaxed.has_value() ? (*oracle.argmin_relaxed)(p.gamma)
                                                         : p.x_star;
    SetSpec lvl_set;
    lvl_set.label = SetLabel::custom;
    lvl_set.bound = program.hard_set.bounding_ball();
    const PopulationOracle* orc = &oracle;
    const double g_ = p.gamma, lo_ = bg.lo, hi_ = bg.hi, lvl_off = lvl;
    lvl_set.member = [orc, g_, lo_, hi_, lvl_off, eta](const Vec& z) {
      if (!orc->domain.contains(z, eta)) return false;
      for (int i = 1; i <= orc->num_constraints; ++i)
        if (orc->f[i](z) > g_ + eta) return false;
      const double v = orc->f[0](z);
      return v >= lo_ + lvl_off - eta && v <= hi_ + lvl_off + eta;
    };
    SupParams sp;
    sp.x_ref = p.x_star;
    sp.origin = origin;
    sp.level = bg.hi + lvl;
    sp.apply_empirical_cap = true;
    sp.y_cap = p.y_star;
    sp.t1 = p.t1;
    sp.sampling = sample.lineage();
    sp.sampling.stream_id ^= 0xd1a1ULL;
    SupValue sv0 =
        sup_deviation(oracle, program, sample, lvl_set, sp, SupKind::delta_pair, budget);
    sup0 = sv0.sampled;
    rep.sups.push_back(sv0);
    for (int i = 1; i <= m; ++i) {
      SetSpec con_set;
      con_set.bound = program.hard_set.bounding_ball();
      const int ii = i;
      con_set.member = [orc, g_, lo_, hi_, lvl_off, eta, ii](const Vec& z) {
        if (!orc->domain.contains(z, eta)) return false;
        for (int j = 1; j <= orc->num_constraints; ++j)
          if (orc->f[j](z) > g_ + eta) return false;
        if (std::abs(orc->f[ii](z) - g_) > eta) return false;
        return orc->f[0](z) <= hi_ + lvl_off + eta;
      };
      SupParams spi = sp;
      spi.constraint = i;
      spi.level = p.gamma;
      spi.origin = oracle.slater_point.value_or(origin);
      spi.sampling.stream_id ^= (0x100ULL + i);
      SupValue svi =
          sup_deviation(oracle, program, sample, con_set, spi, SupKind::constraint_gap, budget);
      supi[i] = svi.sampled;
      rep.sups.push_back(svi);
    }
  }

  rep.c1 = p.t1 <= p.t - p.t0 - delta_yx - sup0;
  bool c2 = true;
  for (int i = 1; i <= m; ++i)
    if (!(supi[i] <= p.gamma - eps_hat)) c2 = false;
  rep.c2 = c2;
  rep.premises_hold = *rep.c1 && *rep.c2 && *rep.c3;
  return rep;
}

ConditionReport check_corollary(const PopulationOracle& oracle, const StochasticProgram& program,
                                const ScenarioSet& sample, CorollaryKind which, double eps,
                                long long budget, CheckMethod method, const GridStudy* grid) {
  (void)budget;
  ConditionReport rep;
  rep.eps_hat = program.relaxation;
  const int m = oracle.num_constraints;
  require(m >= 1, Errc::no_constraints, "check_corollary: m >= 1 required");
  const double eta = level_eta(oracle);

  auto invalid = [&](const std::string& why) {
    rep.premise_invalid = true;
    rep.invalid_reason = why;
    return rep;
  };

  std::unique_ptr<GridStudy> own;
  if (method == CheckMethod::grid && !grid) {
    own = default_grid(oracle, program, sample);
    grid = own.get();
  }
  require(method == CheckMethod::grid, Errc::invalid_argument,
          "check_corollary: grid certification required");
  EmpiricalFunctions emp(program, sample);
  const MinBounds b0 = oracle.min_over_relaxed_bounds(0.0);

  if (which == CorollaryKind::exterior_mr) {
    rep.which = "exterior-MR";
    if (!oracle.mr_constant.has_value()) return invalid("metric regularity constant absent");
    if (!(eps > 0.0)) return invalid("eps-hat must be positive");
    const double eh = eps;
    rep.t1 = eh;
    const double c = *oracle.mr_constant;
    rep.target = TargetSpec{TargetSpec::Kind::exterior, 0.0, 3.0 * eh, 3.0 * c * eh};
    const Vec& xs = oracle.x_star;
    const double fx_emp = grid->emp_at(0, xs);
    const double fx_pop = oracle.f[0](xs);

    GridSetDef ext0;
    ext0.need_dist = true;
    ext0.dist_bound = 3.0 * c * eh;
    ext0.pop_eq.push_back({0, b0.lo + 3.0 * eh, b0.hi + 3.0 * eh, eta});
    CertSup cs0 = certified_sup(
        *grid, ext0,
        [&](long long idx) {
          return std::max(0.0, (grid->pop(0, idx) - fx_pop) - (grid->emp(0, idx) - fx_emp));
        },
        grid->lip_pop(0) + grid->lip_emp(0), eta);
    SupValue sv0{"sup XX*_{0,3e} Delta", cs0.empty ? 0.0 : std::max(0.0, cs0.grid_max),
                 std::nullopt, cs0.upper, 0, cs0.empty};
    if (cs0.witness >= 0) sv0.witness = grid->point(cs0.witness);
    rep.sups.push_back(sv0);
    rep.c1 = cs0.upper <= 2.0 * eh;

    bool c2 = true;
    for (int i = 1; i <= m; ++i) {
      GridSetDef exti;
      exti.need_dist = true;
      exti.dist_bound = 3.0 * c * eh;
      exti.pop_le.push_back({0, b0.hi + 3.0 * eh});
      exti.pop_eq.push_back({i, 3.0 * eh, 3.0 * eh, eta});
      CertSup csi = certified_sup(
          *grid, exti,
          [&](long long idx) { return std::max(0.0, grid->pop(i, idx) - grid->emp(i, idx)); },
          grid->lip_pop(i) + grid->lip_emp(i), eta);
      SupValue svi{"sup XX*_{" + std::to_string(i) + ",3e} Delta_i",
                   csi.empty ? 0.0 : std::max(0.0, csi.grid_max), std::nullopt, csi.upper, 0,
                   csi.empty};
      if (csi.witness >= 0) svi.witness = grid->point(csi.witness);
      rep.sups.push_back(svi);
      if (!(csi.upper <= 2.0 * eh)) c2 = false;
    }
    rep.c2 = c2;

    bool c3 = true;
    for (int i = 1; i <= m; ++i) {
      const double di = std::max(0.0, emp.value(i, xs) - oracle.f[i](xs));
      if (!(di < eh)) c3 = false;
    }
    rep.c3 = c3;
    rep.premises_hold = *rep.c1 && *rep.c2 && *rep.c3;
    return rep;
  }

  // interior kinds share the premise shape; they differ in the localized sets
  // and the witness pair.
  const bool scq = which == CorollaryKind::interior_scq;
  rep.which = scq ? "interior-SCQ" : "interior-solution";
  const double eps_hat = program.relaxation;
  if (!(eps > 0.0)) return invalid("eps must be positive");
  if (!(eps_hat >= -eps)) return invalid("eps-hat >= -eps fails");

  Vec y_star, x_ref;
  double lvl = 0.0;
  if (scq) {
    if (!oracle.slater_point.has_value()) return invalid("Slater point absent");
    const double ring = slater_slack(oracle, *oracle.slater_point);
    if (!(eps <= ring / 2.0)) return invalid("eps exceeds Slater slack / 2");
    if (!oracle.argmin_relaxed.has_value()) return invalid("argmin over X_{-2eps} unavailable");
    MinBounds bm;
    try {
      bm = oracle.min_over_relaxed_bounds(-2.0 * eps);
    } catch (const Error& e) {
      if (e.code() == Errc::empty_set) return invalid("X_{-2eps} empty");
      throw;
    }
    if (bm.hi - bm.lo > 1e-12) return invalid("interior argmin not exact");
    y_star = (*oracle.argmin_relaxed)(-2.0 * eps);
    x_ref = oracle.x_star;
    lvl = 2.0 * eps + gap(oracle, 2.0 * eps);
  } else {
    y_star = oracle.x_star;
    const double ring = slater_slack(oracle, y_star);
    if (!(ring > 0.0)) return invalid("solution is not interior");
    if (!(eps <= ring / 2.0)) return invalid("eps exceeds interior slack / 2");
    x_ref = y_star;
    lvl = 2.0 * eps;
  }
  rep.t1 = eps;
  rep.target = TargetSpec{TargetSpec::Kind::near_optimal_relaxed, 0.0, lvl, 0.0};

  const double fx_emp = grid->emp_at(0, x_ref);
  const double fx_pop = oracle.f[0](x_ref);
  const double delta_yx = std::max(
      0.0, (grid->emp_at(0, y_star) - fx_emp) - (oracle.f[0](y_star) - fx_pop));

  GridSetDef base;
  for (int i = 1; i <= m; ++i) base.pop_le.push_back({i, 0.0});

  GridSetDef def0 = base;
  def0.pop_eq.push_back({0, b0.lo + lvl, b0.hi + lvl, eta});
  CertSup cs0 = certified_sup(
      *grid, def0,
      [&](long long idx) {
        return std::max(0.0, (grid->pop(0, idx) - fx_pop) - (grid->emp(0, idx) - fx_emp));
      },
      grid->lip_pop(0) + grid->lip_emp(0), eta);
  SupValue sv0{"sup opt-level Delta", cs0.empty ? 0.0 : std::max(0.0, cs0.grid_max), std::nullopt,
               cs0.upper, 0, cs0.empty};
  if (cs0.witness >= 0) sv0.witness = grid->point(cs0.witness);
  rep.sups.push_back(sv0);
  rep.c1 = delta_yx + cs0.upper <= eps;

  bool c2 = true;
  for (int i = 1; i <= m; ++i) {
    GridSetDef defi = base;
    defi.pop_le.push_back({0, b0.hi + lvl});
    defi.pop_eq.push_back({i, 0.0, 0.0, eta});
    CertSup csi = certified_sup(
        *grid, defi,
        [&](long long idx) { return std::max(0.0, grid->pop(i, idx) - grid->emp(i, idx)); },
        grid->lip_pop(i) + grid->lip_emp(i), eta);
    SupValue svi{"sup con-level Delta_" + std::to_string(i),
                 csi.empty ? 0.0 : std::max(0.0, csi.grid_max), std::nullopt, csi.upper, 0,
                 csi.empty};
    if (csi.witness >= 0) svi.witness = grid->point(csi.witness);
    rep.sups.push_back(svi);
    if (!(csi.upper <= -eps_hat)) c2 = false;
  }
  rep.c2 = c2;

  bool c3 = true;
  for (int i = 1; i <= m; ++i) {
    const double di = std::max(0.0, emp.value(i, y_star) - oracle.f[i](y_star));
    if (!(di < eps)) c3 = false;
  }
  rep.c3 = c3;
  rep.premises_hold = *rep.c1 && *rep.c2 && *rep.c3;
  return rep;
}

InclusionResult inclusion_check(const PopulationOracle& oracle, const StochasticProgram& program,
                                const ScenarioSet& sample, double t1, const TargetSpec& target,
                                long long budget, const GridStudy* grid) {
  std::unique_ptr<GridStudy> own;
  if (!grid) {
    own = default_grid(oracle, program, sample);
    grid = own.get();
  }
  const double eta = level_eta(oracle);
  const double eps_hat = program.relaxation;
  const int m = oracle.num_constraints;

  MinBounds emin;
  try {
    emin = grid->empirical_min();
  } catch (const Error& e) {
    if (e.code() == Errc::empty_set) return InclusionResult{true, std::nullopt, 0};
    throw;
  }

  MinBounds target_min{0.0, 0.0};
  if (target.kind == TargetSpec::Kind::near_optimal_relaxed)
    target_min = oracle.min_over_relaxed_bounds(target.gamma);
  else
    target_min = oracle.min_over_relaxed_bounds(0.0);

  auto violation = [&](const Vec& z, double fz) {
    double v = -kInf;
    if (target.kind == TargetSpec::Kind::near_optimal_relaxed) {
      for (int i = 1; i <= m; ++i) v = std::max(v, oracle.f[i](z) - target.gamma);
      v = std::max(v, fz - (target_min.hi + target.level));
    } else {
      require(oracle.project_feasible.has_value(), Errc::missing_ingredient,
              "inclusion_check: exterior target needs projection onto X");
      v = (z - (*oracle.project_feasible)(z)).norm() - target.radius;
      v = std::max(v, fz - (target_min.hi + target.level));
    }
    return v;
  };

  InclusionResult out;
  const long long total = grid->size();
  for (long long idx = 0; idx < total; ++idx) {
    bool member = grid->emp(0, idx) <= emin.lo + t1;
    for (int i = 1; i <= m && member; ++i) member = grid->emp(i, idx) <= eps_hat;
    if (!member) continue;
    ++out.candidates;
    const Vec z = grid->point(idx);
    if (violation(z, grid->pop(0, idx)) > eta + 1e-12) {
      out.holds = false;
      out.counterexample = z;
      return out;
    }
  }

  // also probe the solver's empirical solution
  if (budget >= 1000) {
    try {
      SolveResult sr = solve_saa(program, sample, 1e-6, 1e-9, budget);
      bool member = grid->emp_at(0, sr.x) <= emin.lo + t1;
      for (int i = 1; i <= m && member; ++i) member = grid->emp_at(i, sr.x) <= eps_hat;
      if (member) {
        ++out.candidates;
        if (violation(sr.x, oracle.f[0](sr.x)) > eta + 1e-12) {
          out.holds = false;
          out.counterexample = sr.x;
        }
      }
    } catch (const Error&) {
      // solver failure: the grid scan already covered the search
    }
  }
  return out;
}

}  // namespace saa
