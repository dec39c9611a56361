#include "saa/instances.hpp"

#include <cmath>
#include <fstream>

namespace saa {

namespace {

using nlohmann::json;

// Deterministic convex function with exact subgradient and a Lipschitz bound
// over the hard set.
struct ConvexFn {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> subgrad;
  double lip = 0.0;
};

double max_dist_in_body(const ConvexBody& y, const Vec& x0) {
  if (y.kind() == ConvexBody::Kind::ball)
    return (y.bounding_ball().center - x0).norm() + y.bounding_ball().radius;
  // box: the farthest point is a corner; per-axis farthest bound
  double s = 0.0;
  for (int k = 0; k < y.dim(); ++k) {
    const double d = std::max(std::abs(y.aabb_lo()[k] - x0[k]), std::abs(y.aabb_hi()[k] - x0[k]));
    s += d * d;
  }
  return std::sqrt(s);
}

ConvexFn make_affine(Vec c, double c0) {
  ConvexFn f;
  const double lip = c.norm();
  f.value = [c, c0](const Vec& x) { return c.dot(x) + c0; };
  f.subgrad = [c](const Vec&) { return c; };
  f.lip = lip;
  return f;
}

ConvexFn make_quadratic(double kappa, Vec x0, const ConvexBody& y) {
  ConvexFn f;
  f.value = [kappa, x0](const Vec& x) { return kappa * (x - x0).squaredNorm(); };
  f.subgrad = [kappa, x0](const Vec& x) { return Vec(2.0 * kappa * (x - x0)); };
  f.lip = 2.0 * kappa * max_dist_in_body(y, x0);
  return f;
}

ConvexFn make_norm(Vec x0) {
  ConvexFn f;
  f.value = [x0](const Vec& x) { return (x - x0).norm(); };
  f.subgrad = [x0](const Vec& x) {
    const double r = (x - x0).norm();
    if (r < 1e-14) return Vec(Vec::Zero(x.size()));
    return Vec((x - x0) / r);
  };
  f.lip = 1.0;
  return f;
}

ConvexFn make_ball_residual(Vec center, double radius) {
  ConvexFn f;
  f.value = [center, radius](const Vec& x) { return (x - center).norm() - radius; };
  f.subgrad = [center](const Vec& x) {
    const double r = (x - center).norm();
    if (r < 1e-14) return Vec(Vec::Zero(x.size()));
    return Vec((x - center) / r);
  };
  f.lip = 1.0;
  return f;
}

ConvexFn make_max_affine(std::vector<Vec> cs, std::vector<double> ds) {
  ConvexFn f;
  double lip = 0.0;
  for (const Vec& c : cs) lip = std::max(lip, c.norm());
  f.value = [cs, ds](const Vec& x) {
    double best = cs[0].dot(x) + ds[0];
    for (std::size_t k = 1; k < cs.size(); ++k) best = std::max(best, cs[k].dot(x) + ds[k]);
    return best;
  };
  f.subgrad = [cs, ds](const Vec& x) {
    std::size_t arg = 0;
    double best = cs[0].dot(x) + ds[0];
    for (std::size_t k = 1; k < cs.size(); ++k) {
      const double v = cs[k].dot(x) + ds[k];
      if (v > best) {
        best = v;
        arg = k;
      }
    }
    return cs[arg];
  };
  f.lip = lip;
  return f;
}

double draw_factor(const NoiseSpec& spec, Variate& v) {
  switch (spec.family) {
    case NoiseSpec::Family::none: return 1.0;
    case NoiseSpec::Family::pareto:
      return 1.0 + spec.scale * (v.pareto_mean1(spec.tail_index) - 1.0);
    case NoiseSpec::Family::student_t:
      return 1.0 + spec.scale * v.student_t_std(spec.dof);
  }
  return 1.0;
}

double factor_variance_of(const NoiseSpec& spec) {
  switch (spec.family) {
    case NoiseSpec::Family::none: return 0.0;
    case NoiseSpec::Family::pareto:
      return spec.scale * spec.scale * (pareto_mean1_moment(spec.tail_index, 2.0) - 1.0);
    case NoiseSpec::Family::student_t: return spec.scale * spec.scale;
  }
  return 0.0;
}

// Upper bound on E|factor| (exact for nonnegative pareto blends).
double factor_abs_mean_bound(const NoiseSpec& spec) {
  if (spec.family == NoiseSpec::Family::student_t)
    return std::sqrt(1.0 + spec.scale * spec.scale);
  return 1.0;
}

NoiseSpec noise_from_json(const json& j) {
  NoiseSpec n;
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "none") {
    n.family = NoiseSpec::Family::none;
  } else if (fam == "pareto") {
    n.family = NoiseSpec::Family::pareto;
    n.tail_index = j.at("tail_index").get<double>();
    n.scale = j.value("scale", 1.0);
    require(n.tail_index > 2.0, Errc::config_error, "noise: pareto tail_index must exceed 2");
    require(n.scale > 0.0 && n.scale <= 1.0, Errc::config_error,
            "noise: pareto scale must lie in (0,1] to keep factors nonnegative");
  } else if (fam == "student_t") {
    n.family = NoiseSpec::Family::student_t;
    n.dof = j.at("dof").get<double>();
    n.scale = j.value("scale", 1.0);
    require(n.dof > 2.0, Errc::config_error, "noise: student_t dof must exceed 2");
    require(n.scale > 0.0, Errc::config_error, "noise: scale must be positive");
  } else {
    throw Error(Errc::config_error, "noise: unknown family " + fam);
  }
  return n;
}

json noise_to_json(const NoiseSpec& n) {
  switch (n.family) {
    case NoiseSpec::Family::none: return json{{"family", "none"}};
    case NoiseSpec::Family::pareto:
      return json{{"family", "pareto"}, {"tail_index", n.tail_index}, {"scale", n.scale}};
    case NoiseSpec::Family::student_t:
      return json{{"family", "student_t"}, {"dof", n.dof}, {"scale", n.scale}};
  }
  return json{};
}

Vec vec_from_json(const json& j) {
  Vec v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<int>(k)] = j[k].get<double>();
  return v;
}

json vec_to_json(const Vec& v) {
  json j = json::array();
  for (int k = 0; k < v.size(); ++k) j.push_back(v[k]);
  return j;
}

ConvexFn constraint_from_json(const json& j, const ConvexBody& y) {
  (void)y;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "affine") return make_affine(vec_from_json(j.at("a")), -j.at("b").get<double>());
  if (kind == "ball")
    return make_ball_residual(vec_from_json(j.at("center")), j.at("radius").get<double>());
  throw Error(Errc::config_error, "constraint: unknown kind " + kind);
}

ConvexFn objective_from_family(const std::string& family, const json& params, const ConvexBody& y) {
  const json& obj = params.at("objective");
  if (family == "affine") return make_affine(vec_from_json(obj.at("c")), obj.value("c0", 0.0));
  if (family == "quadratic")
    return make_quadratic(obj.at("kappa").get<double>(), vec_from_json(obj.at("center")), y);
  if (family == "norm") return make_norm(vec_from_json(obj.at("center")));
  if (family == "max_affine") {
    std::vector<Vec> cs;
    std::vector<double> ds;
    for (const auto& p : obj.at("pieces")) {
      cs.push_back(vec_from_json(p.at("c")));
      ds.push_back(p.value("d", 0.0));
    }
    return make_max_affine(std::move(cs), std::move(ds));
  }
  throw Error(Errc::config_error, "objective: unknown loss_family " + family);
}

}  // namespace

GridTruth::GridTruth(const StochasticProgram& program,
                     const std::vector<std::function<double(const Vec&)>>& f,
                     const std::vector<double>& lip, int points_per_axis)
    : lip_(lip) {
  require(program.hard_set.kind() == ConvexBody::Kind::box, Errc::invalid_argument,
          "GridTruth: box hard sets only");
  const int d = program.dimension;
  require(d >= 1 && d <= 3, Errc::invalid_argument, "GridTruth: d must be in 1..3");
  lo_ = program.hard_set.aabb_lo();
  hi_ = program.hard_set.aabb_hi();
  counts_.assign(d, points_per_axis);
  long long total = 1;
  double cover_sq = 0.0;
  for (int k = 0; k < d; ++k) {
    total *= counts_[k];
    const double m = (hi_[k] - lo_[k]) / (counts_[k] - 1);
    mesh_ = std::max(mesh_, m);
    cover_sq += m * m;
  }
  cover_ = 0.5 * std::sqrt(cover_sq);
  require(total <= 40'000'000LL, Errc::invalid_argument, "GridTruth: grid too large");
  vals_.assign(f.size(), std::vector<double>(total));
  for (long long idx = 0; idx < total; ++idx) {
    const Vec x = point(idx);
    for (std::size_t i = 0; i < f.size(); ++i) vals_[i][idx] = f[i](x);
  }
}

Vec GridTruth::point(long long idx) const {
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

MinBounds GridTruth::min_relaxed(double gamma) const {
  const long long total = static_cast<long long>(vals_[0].size());
  const int m = static_cast<int>(vals_.size()) - 1;
  double exact_min = std::numeric_limits<double>::infinity();
  double inflated_min = std::numeric_limits<double>::infinity();
  for (long long idx = 0; idx < total; ++idx) {
    bool exact_ok = true, inflated_ok = true;
    for (int i = 1; i <= m && inflated_ok; ++i) {
      const double v = vals_[i][idx];
      if (v > gamma) exact_ok = false;
      if (v > gamma + lip_[i] * cover_) inflated_ok = false;
    }
    if (!inflated_ok) continue;
    const double v0 = vals_[0][idx];
    if (v0 < inflated_min) inflated_min = v0;
    if (exact_ok && v0 < exact_min) exact_min = v0;
  }
  if (!std::isfinite(exact_min))
    throw Error(Errc::empty_set, "GridTruth: X_gamma has no grid witness");
  return MinBounds{inflated_min - lip_[0] * cover_, exact_min};
}

Vec GridTruth::argmin_relaxed(double gamma) const {
  const long long total = static_cast<long long>(vals_[0].size());
  const int m = static_cast<int>(vals_.size()) - 1;
  double best = std::numeric_limits<double>::infinity();
  long long best_idx = -1;
  for (long long idx = 0; idx < total; ++idx) {
    bool ok = true;
    for (int i = 1; i <= m && ok; ++i)
      if (vals_[i][idx] > gamma) ok = false;
    if (!ok) continue;
    if (vals_[0][idx] < best) {
      best = vals_[0][idx];
      best_idx = idx;
    }
  }
  if (best_idx < 0) throw Error(Errc::empty_set, "GridTruth: X_gamma has no grid witness");
  return point(best_idx);
}

InstanceDescriptor descriptor_from_json(const json& j) {
  InstanceDescriptor d;
  d.schema_version = j.at("schema_version").get<int>();
  require(d.schema_version == 1, Errc::config_error, "descriptor: unsupported schema_version");
  d.name = j.value("name", std::string{});
  d.dimension = j.at("dimension").get<int>();
  d.m = j.at("m").get<int>();
  require(d.dimension >= 1, Errc::config_error, "descriptor: dimension must be >= 1");
  require(d.m >= 0, Errc::config_error, "descriptor: m must be >= 0");

  const json& hs = j.at("hard_set");
  const std::string kind = hs.at("kind").get<std::string>();
  const Vec center = vec_from_json(hs.at("center"));
  const double radius = hs.at("radius").get<double>();
  require(center.size() == d.dimension, Errc::config_error, "descriptor: hard_set dimension");
  if (kind == "box")
    d.hard_set = ConvexBody::box(center.array() - radius, center.array() + radius);
  else if (kind == "ball")
    d.hard_set = ConvexBody::ball(center, radius);
  else
    throw Error(Errc::config_error, "descriptor: hard_set kind must be box or ball");

  d.loss_family = j.at("loss_family").get<std::string>();
  const json& nz = j.at("noise");
  if (nz.is_array()) {
    require(static_cast<int>(nz.size()) == d.m + 1, Errc::config_error,
            "descriptor: noise array must have m+1 entries");
    for (const auto& e : nz) d.noise.push_back(noise_from_json(e));
  } else {
    for (int i = 0; i <= d.m; ++i) d.noise.push_back(noise_from_json(nz));
  }
  d.relaxation = j.at("relaxation").get<double>();
  d.params = j.value("params", json::object());
  const auto cons = d.params.value("constraints", json::array());
  require(static_cast<int>(cons.size()) == d.m, Errc::config_error,
          "descriptor: params.constraints must list m entries");
  return d;
}

json descriptor_to_json(const InstanceDescriptor& d) {
  json j;
  j["schema_version"] = d.schema_version;
  if (!d.name.empty()) j["name"] = d.name;
  j["dimension"] = d.dimension;
  j["m"] = d.m;
  const Ball b = d.hard_set.bounding_ball();
  if (d.hard_set.kind() == ConvexBody::Kind::box) {
    const Vec c = 0.5 * (d.hard_set.aabb_lo() + d.hard_set.aabb_hi());
    j["hard_set"] = {{"kind", "box"},
                     {"center", vec_to_json(c)},
                     {"radius", 0.5 * (d.hard_set.aabb_hi()[0] - d.hard_set.aabb_lo()[0])}};
  } else {
    j["hard_set"] = {{"kind", "ball"}, {"center", vec_to_json(b.center)}, {"radius", b.radius}};
  }
  j["loss_family"] = d.loss_family;
  json nz = json::array();
  for (const auto& n : d.noise) nz.push_back(noise_to_json(n));
  j["noise"] = nz;
  j["relaxation"] = d.relaxation;
  j["params"] = d.params;
  return j;
}

InstanceDescriptor load_descriptor(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Errc::io_error, "cannot open instance descriptor: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(Errc::config_error, std::string("descriptor parse error: ") + e.what());
  }
  return descriptor_from_json(j);
}

Instance make_instance(const InstanceDescriptor& d) {
  Instance inst;
  inst.id = d.name.empty() ? "instance" : d.name;
  inst.descriptor_json = descriptor_to_json(d);

  std::vector<ConvexFn> fns;
  fns.push_back(objective_from_family(d.loss_family, d.params, d.hard_set));
  for (const auto& cj : d.params.value("constraints", json::array()))
    fns.push_back(constraint_from_json(cj, d.hard_set));
  require(static_cast<int>(fns.size()) == d.m + 1, Errc::config_error, "instance: constraint count");

  for (int i = 0; i <= d.m; ++i) {
    if (d.noise[i].family == NoiseSpec::Family::student_t) {
      const bool affine_obj = (i == 0 && d.loss_family == "affine");
      const bool affine_con =
          (i > 0 && d.params["constraints"][i - 1].at("kind").get<std::string>() == "affine");
      require(affine_obj || affine_con, Errc::config_error,
              "instance: student_t factors can be negative; affine losses only");
    }
  }

  StochasticProgram& prog = inst.program;
  prog.dimension = d.dimension;
  prog.num_constraints = d.m;
  prog.hard_set = d.hard_set;
  prog.relaxation = d.relaxation;
  const std::vector<NoiseSpec> noise = d.noise;
  prog.sampler = [noise](Variate& v) {
    Scenario xi(noise.size());
    for (std::size_t i = 0; i < noise.size(); ++i) xi[static_cast<int>(i)] = draw_factor(noise[i], v);
    return xi;
  };
  for (int i = 0; i <= d.m; ++i) {
    const ConvexFn fn = fns[i];
    LossFunction loss;
    loss.value = [fn, i](const Vec& x, const Scenario& xi) { return xi[i] * fn.value(x); };
    loss.subgradient = [fn, i](const Vec& x, const Scenario& xi) { return Vec(xi[i] * fn.subgrad(x)); };
    const double lip = fn.lip;
    loss.lipschitz = [lip, i](const Scenario& xi) { return std::abs(xi[i]) * lip; };
    prog.losses.push_back(std::move(loss));
    SeparableLoss sep;
    sep.g = fn.value;
    sep.g_subgradient = fn.subgrad;
    sep.g_lipschitz = fn.lip;
    prog.separable.push_back(std::move(sep));
  }

  PopulationOracle& orc = inst.oracle;
  orc.dimension = d.dimension;
  orc.num_constraints = d.m;
  orc.domain = d.hard_set;
  for (int i = 0; i <= d.m; ++i) {
    orc.f.push_back(fns[i].value);
    orc.f_subgrad.push_back(fns[i].subgrad);
    orc.factor_variance.push_back(factor_variance_of(d.noise[i]));
    orc.lipschitz_sq.push_back((1.0 + orc.factor_variance[i]) * fns[i].lip * fns[i].lip);
    orc.lipschitz_mean.push_back(factor_abs_mean_bound(d.noise[i]) * fns[i].lip);
  }

  if (d.hard_set.kind() == ConvexBody::Kind::box && d.dimension <= 3) {
    const int per_axis = d.dimension == 1 ? 100'001 : (d.dimension == 2 ? 501 : 61);
    std::vector<double> lips = orc.lipschitz_mean;
    inst.grid_truth = std::make_shared<GridTruth>(prog, orc.f, lips, per_axis);
    auto gt = inst.grid_truth;
    orc.min_over_relaxed_bounds = [gt](double g) { return gt->min_relaxed(g); };
    orc.argmin_relaxed = [gt](double g) { return gt->argmin_relaxed(g); };
    orc.x_star = (*orc.argmin_relaxed)(0.0);
    orc.f_star = orc.min_over_relaxed_bounds(0.0).hi;
  } else {
    orc.min_over_relaxed_bounds = [](double) -> MinBounds {
      throw Error(Errc::missing_ingredient,
                  "instance: no ground-truth minima; patch the oracle with closed forms");
    };
  }
  return inst;
}

namespace {

InstanceDescriptor builtin_descriptor(const std::string& name) {
  json pareto = {{"family", "pareto"}, {"tail_index", 4.5}, {"scale", 1.0}};
  if (name == "thm3-fixed-1d") {
    return descriptor_from_json(json{
        {"schema_version", 1},
        {"name", name},
        {"dimension", 1},
        {"m", 0},
        {"hard_set", {{"kind", "box"}, {"center", {0.5}}, {"radius", 0.5}}},
        {"loss_family", "affine"},
        {"noise", pareto},
        {"relaxation", 0.0},
        {"params", {{"objective", {{"c", {1.0}}, {"c0", 0.0}}}, {"constraints", json::array()}}}});
  }
  if (name == "thm4-exterior-1d") {
    return descriptor_from_json(json{
        {"schema_version", 1},
        {"name", name},
        {"dimension", 1},
        {"m", 1},
        {"hard_set", {{"kind", "box"}, {"center", {0.0}}, {"radius", 1.0}}},
        {"loss_family", "affine"},
        {"noise", pareto},
        {"relaxation", 0.0},
        {"params",
         {{"objective", {{"c", {1.0}}, {"c0", 0.0}}},
          {"constraints", json::array({json{{"kind", "affine"}, {"a", {-1.0}}, {"b", 0.0}}})}}}});
  }
  if (name == "thm5-scq-1d") {
    return descriptor_from_json(json{
        {"schema_version", 1},
        {"name", name},
        {"dimension", 1},
        {"m", 1},
        {"hard_set", {{"kind", "box"}, {"center", {0.0}}, {"radius", 2.0}}},
        {"loss_family", "affine"},
        {"noise", pareto},
        {"relaxation", 0.0},
        {"params",
         {{"objective", {{"c", {1.0}}, {"c0", 0.0}}},
          {"constraints",
           json::array({json{{"kind", "ball"}, {"center", {0.0}}, {"radius", 1.0}}})}}}});
  }
  if (name == "cor4-interior-1d") {
    return descriptor_from_json(json{
        {"schema_version", 1},
        {"name", name},
        {"dimension", 1},
        {"m", 1},
        {"hard_set", {{"kind", "box"}, {"center", {0.0}}, {"radius", 2.0}}},
        {"loss_family", "quadratic"},
        {"noise", pareto},
        {"relaxation", 0.0},
        {"params",
         {{"objective", {{"kappa", 1.0}, {"center", {-0.2}}}},
          {"constraints",
           json::array({json{{"kind", "ball"}, {"center", {0.0}}, {"radius", 1.0}}})}}}});
  }
  if (name == "locdemo-2d") {
    return descriptor_from_json(json{
        {"schema_version", 1},
        {"name", name},
        {"dimension", 2},
        {"m", 0},
        {"hard_set", {{"kind", "ball"}, {"center", {0.0, 0.0}}, {"radius", 1.0}}},
        {"loss_family", "quadratic"},
        {"noise", pareto},
        {"relaxation", 0.0},
        {"params",
         {{"objective", {{"kappa", 6.0}, {"center", {0.15, -0.1}}}},
          {"constraints", json::array()}}}});
  }
  throw Error(Errc::unknown_kind, "unknown builtin instance: " + name);
}

Vec vec1(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}

}  // namespace

std::vector<std::string> builtin_instance_names() {
  return {"thm3-fixed-1d", "thm4-exterior-1d", "thm5-scq-1d", "cor4-interior-1d", "locdemo-2d"};
}

Instance builtin_instance(const std::string& name) {
  Instance inst = make_instance(builtin_descriptor(name));
  PopulationOracle& o = inst.oracle;
  inst.grid_truth.reset();  // closed forms below supersede grid bounds

  if (name == "thm3-fixed-1d") {
    o.x_star = vec1(0.0);
    o.f_star = 0.0;
    o.min_over_relaxed_bounds = [](double) { return MinBounds{0.0, 0.0}; };
    o.argmin_relaxed = [](double) { return vec1(0.0); };
    o.level_radius = [](double g) { return g; };
    const ConvexBody y = o.domain;
    o.project_feasible = [y](const Vec& x) { return y.project(x); };
  } else if (name == "thm4-exterior-1d") {
    o.x_star = vec1(0.0);
    o.f_star = 0.0;
    o.min_over_relaxed_bounds = [](double g) {
      require(g >= -1.0, Errc::empty_set, "thm4: X_gamma empty");
      const double v = -std::min(g, 1.0);
      return MinBounds{v, v};
    };
    o.argmin_relaxed = [](double g) {
      require(g >= -1.0, Errc::empty_set, "thm4: X_gamma empty");
      return vec1(-std::min(g, 1.0));
    };
    o.mr_constant = 1.0;
    o.slater_point = vec1(0.5);
    o.level_radius = [](double g) { return g; };
    o.project_feasible = [](const Vec& x) { return vec1(std::clamp(x[0], 0.0, 1.0)); };
  } else if (name == "thm5-scq-1d") {
    o.x_star = vec1(-1.0);
    o.f_star = -1.0;
    o.min_over_relaxed_bounds = [](double g) {
      require(g >= -1.0, Errc::empty_set, "thm5: X_gamma empty");
      const double v = -std::min(1.0 + g, 2.0);
      return MinBounds{v, v};
    };
    o.argmin_relaxed = [](double g) {
      require(g >= -1.0, Errc::empty_set, "thm5: X_gamma empty");
      return vec1(-std::min(1.0 + g, 2.0));
    };
    o.mr_constant = 1.0;
    o.slater_point = vec1(0.0);
    o.level_radius = [](double g) { return g; };
    o.project_feasible = [](const Vec& x) { return vec1(std::clamp(x[0], -1.0, 1.0)); };
  } else if (name == "cor4-interior-1d") {
    o.x_star = vec1(-0.2);
    o.f_star = 0.0;
    o.min_over_relaxed_bounds = [](double g) {
      require(g >= -1.0, Errc::empty_set, "cor4: X_gamma empty");
      const double reach = std::min(1.0 + g, 2.0);
      const double v = reach >= 0.2 ? 0.0 : (0.2 - reach) * (0.2 - reach);
      return MinBounds{v, v};
    };
    o.argmin_relaxed = [](double g) {
      require(g >= -1.0, Errc::empty_set, "cor4: X_gamma empty");
      const double reach = std::min(1.0 + g, 2.0);
      return vec1(reach >= 0.2 ? -0.2 : -reach);
    };
    o.mr_constant = 1.0;
    o.slater_point = vec1(0.0);
    o.level_radius = [](double g) { return std::sqrt(g); };
    o.project_feasible = [](const Vec& x) { return vec1(std::clamp(x[0], -1.0, 1.0)); };
  } else if (name == "locdemo-2d") {
    Vec x0(2);
    x0 << 0.15, -0.1;
    o.x_star = x0;
    o.f_star = 0.0;
    o.min_over_relaxed_bounds = [](double) { return MinBounds{0.0, 0.0}; };
    const Vec xs = x0;
    o.argmin_relaxed = [xs](double) { return xs; };
    o.level_radius = [](double g) { return std::sqrt(g / 6.0); };
    const ConvexBody y = o.domain;
    o.project_feasible = [y](const Vec& x) { return y.project(x); };
  }
  return inst;
}

Instance load_instance(const std::string& ref) {
  constexpr const char* kPrefix = "builtin:";
  if (ref.rfind(kPrefix, 0) == 0) return builtin_instance(ref.substr(std::string(kPrefix).size()));
  return make_instance(load_descriptor(ref));
}

SoundnessInstance make_soundness_instance(std::uint64_t seed, std::uint64_t index) {
  RngStream stream(seed, 0xba5e11ULL);
  Variate v(stream, index);
  const char* modes[] = {"c0", "c1c2c3", "exterior", "interior-solution", "interior-scq"};
  const std::string mode = modes[index % 5];

  const int d = (v.u01() < 0.5 && mode != "c0") ? 2 : (v.u01() < 0.45 ? 1 : 2);
  Vec center(d), halfw(d);
  for (int k = 0; k < d; ++k) {
    center[k] = v.uniform(-0.3, 0.3);
    halfw[k] = v.uniform(0.8, 1.2);
  }

  json hard_set = {{"kind", "box"}, {"center", vec_to_json(center)}, {"radius", 0.0}};
  // descriptor boxes are cubes; use the smallest half-width
  const double hw = halfw.minCoeff();
  hard_set["radius"] = hw;
  const Vec lo = center.array() - hw;
  const Vec hi = center.array() + hw;

  // interior point with known constraint margin
  Vec p(d);
  for (int k = 0; k < d; ++k) p[k] = center[k] + v.uniform(-0.2, 0.2) * hw;

  // objective
  const bool force_quadratic = mode == "interior-solution" || mode == "interior-scq";
  int obj_kind = force_quadratic ? 1 : static_cast<int>(v.u01() * 3.0);  // 0 affine, 1 quad, 2 max-affine
  std::string family;
  json objective;
  if (obj_kind == 0) {
    family = "affine";
    Vec c(d);
    for (int k = 0; k < d; ++k) c[k] = v.uniform(-2.0, 2.0);
    if (c.norm() < 0.3) c[0] += 1.0;
    objective = {{"c", vec_to_json(c)}, {"c0", v.uniform(-0.5, 0.5)}};
  } else if (obj_kind == 1) {
    family = "quadratic";
    Vec x0(d);
    const double kappa = v.uniform(0.5, 3.0);
    if (mode == "interior-solution") {
      x0 = p;
    } else {
      for (int k = 0; k < d; ++k) x0[k] = center[k] + v.uniform(-1.4, 1.4) * hw;
    }
    objective = {{"kappa", kappa}, {"center", vec_to_json(x0)}};
  } else {
    family = "max_affine";
    json pieces = json::array();
    const int np = 2 + static_cast<int>(v.u01() * 2.0);
    for (int t = 0; t < np; ++t) {
      Vec c(d);
      for (int k = 0; k < d; ++k) c[k] = v.uniform(-1.5, 1.5);
      pieces.push_back(json{{"c", vec_to_json(c)}, {"d", v.uniform(-0.5, 0.5)}});
    }
    objective = {{"pieces", pieces}};
  }

  // constraints with exact margin at p
  json constraints = json::array();
  double margin = 0.0;
  std::optional<double> mr;
  Vec ball_center(d);
  double ball_radius = 0.0;
  bool has_ball = false;
  if (mode == "c0") {
    margin = 0.0;  // no soft constraints
  } else if (mode == "exterior" || mode == "interior-scq") {
    // single ball strictly inside Y: metric regularity constant 1
    ball_center = center;
    ball_radius = v.uniform(0.35, 0.6) * hw;
    has_ball = true;
    constraints.push_back(
        json{{"kind", "ball"}, {"center", vec_to_json(ball_center)}, {"radius", ball_radius}});
    mr = 1.0;
    p = ball_center;  // strictly feasible with margin = radius
    margin = ball_radius;
  } else {
    const int mc = 1 + static_cast<int>(v.u01() * 2.0);
    margin = v.uniform(0.25, 0.4) * hw;
    for (int t = 0; t < mc; ++t) {
      Vec a(d);
      for (int k = 0; k < d; ++k) a[k] = v.uniform(-1.0, 1.0);
      if (a.norm() < 0.2) a[0] = 1.0;
      a /= a.norm();
      constraints.push_back(json{{"kind", "affine"}, {"a", vec_to_json(a)}, {"b", a.dot(p) + margin}});
    }
  }

  // noise
  json noise;
  if (family == "affine" && constraints.empty() && v.u01() < 0.4) {
    noise = {{"family", "student_t"}, {"dof", v.uniform(8.0, 12.0)}, {"scale", v.uniform(0.1, 0.3)}};
  } else {
    noise = {{"family", "pareto"}, {"tail_index", v.uniform(3.5, 6.0)},
             {"scale", v.uniform(0.5, 1.0)}};
  }

  json dj = {{"schema_version", 1},
             {"name", "soundness-" + std::to_string(index)},
             {"dimension", d},
             {"m", static_cast<int>(constraints.size())},
             {"hard_set", hard_set},
             {"loss_family", family},
             {"noise", noise},
             {"relaxation", 0.0},
             {"params", {{"objective", objective}, {"constraints", constraints}}}};

  SoundnessInstance out;
  out.mode = mode;
  out.instance = make_instance(descriptor_from_json(dj));
  out.interior_point = p;
  out.interior_margin = margin;
  PopulationOracle& o = out.instance.oracle;
  if (mr) o.mr_constant = mr;
  if (has_ball) {
    const Vec bc = ball_center;
    const double br = ball_radius;
    o.project_feasible = [bc, br](const Vec& x) {
      const double r = (x - bc).norm();
      if (r <= br) return x;
      return Vec(bc + (br / r) * (x - bc));
    };
    o.slater_point = bc;
  }
  if (mode == "interior-solution") {
    // quadratic center p lies strictly inside X: exact solution
    o.x_star = p;
    o.f_star = 0.0;
    const double kappa = dj["params"]["objective"]["kappa"].get<double>();
    o.level_radius = [kappa](double g) { return std::sqrt(g / kappa); };
  }
  if (mode == "interior-scq" && has_ball) {
    const double kappa = dj["params"]["objective"]["kappa"].get<double>();
    const Vec x0 = vec_from_json(dj["params"]["objective"]["center"]);
    const Vec bc = ball_center;
    const double br = ball_radius;
    const double dist0 = (x0 - bc).norm();
    o.min_over_relaxed_bounds = [kappa, dist0, br](double g) {
      require(br + g >= 0.0, Errc::empty_set, "interior-scq: X_gamma empty");
      const double excess = std::max(0.0, dist0 - (br + g));
      const double val = kappa * excess * excess;
      return MinBounds{val, val};
    };
    o.f_star = o.min_over_relaxed_bounds(0.0).hi;
    o.x_star = dist0 <= br ? x0 : Vec(bc + (br / dist0) * (x0 - bc));
    o.argmin_relaxed = [kappa, x0, bc, br, dist0](double g) {
      (void)kappa;
      require(br + g >= 0.0, Errc::empty_set, "interior-scq: X_gamma empty");
      if (dist0 <= br + g) return x0;
      return Vec(bc + ((br + g) / dist0) * (x0 - bc));
    };
    o.level_radius = [kappa](double g) { return std::sqrt(g / kappa); };
    out.instance.grid_truth.reset();
  }
  if (mode == "c0" && family == "quadratic") {
    // quadratic center inside Y (m = 0): exact solution when interior
    const Vec x0 = vec_from_json(dj["params"]["objective"]["center"]);
    if (out.instance.program.hard_set.contains(x0)) {
      o.x_star = x0;
      o.f_star = 0.0;
      const double kappa = dj["params"]["objective"]["kappa"].get<double>();
      o.level_radius = [kappa](double g) { return std::sqrt(g / kappa); };
    }
  }
  return out;
}

}  // namespace saa
