#include "saa/concentration.hpp"

#include <algorithm>
#include <cmath>

#include "saa/entropy.hpp"
#include "saa/error.hpp"

namespace saa {

TailBound panchenko_threshold(double v_hat, long long n, double t) {
  require(v_hat >= 0.0 && n >= 1 && t > 0.0, Errc::invalid_argument, "panchenko: bad inputs");
  TailBound b;
  b.name = "panchenko";
  b.threshold = std::sqrt(2.0 * (1.0 + t) * v_hat / n);
  b.claimed_tail = 2.0 * std::exp(-t);
  b.n = n;
  b.t = t;
  return b;
}

TailBound self_normalized_threshold(const std::vector<double>& g_samples, double pop_mean,
                                    double pop_central_second, double t) {
  require(!g_samples.empty() && t > 0.0 && pop_central_second >= 0.0, Errc::invalid_argument,
          "self_normalized: bad inputs");
  const long long n = static_cast<long long>(g_samples.size());
  double emp_central = 0.0;
  for (double g : g_samples) emp_central += (g - pop_mean) * (g - pop_mean);
  emp_central /= n;
  TailBound b;
  b.name = "self-normalized";
  b.threshold = std::sqrt(2.0 * (1.0 + t) / n * (emp_central + pop_central_second));
  b.claimed_tail = 2.0 * std::exp(-t);
  b.n = n;
  b.t = t;
  return b;
}

TailBound uniform_deviation_threshold(double a1, double lip_hat, double lip, long long n,
                                      double t) {
  require(a1 >= 0.0 && lip_hat >= 0.0 && lip >= 0.0 && n >= 1 && t > 0.0, Errc::invalid_argument,
          "uniform_deviation: bad inputs");
  TailBound b;
  b.name = "uniform-deviation";
  b.threshold = 2.0 * a1 * std::sqrt((1.0 + t) * (lip_hat * lip_hat + lip * lip) / n);
  b.claimed_tail = 2.0 * std::exp(-t);
  b.n = n;
  b.t = t;
  return b;
}

double lower_tail_probability_bound(double mean_z, double moment_z_a, double a, double eps,
                                    long long n) {
  require(a > 1.0 && a <= 2.0, Errc::invalid_argument, "lower_tail: a must lie in (1, 2]");
  require(mean_z > 0.0 && eps > 0.0 && n >= 1, Errc::invalid_argument, "lower_tail: bad inputs");
  require(moment_z_a >= std::pow(mean_z, a), Errc::invalid_argument,
          "lower_tail: E Z^a must dominate (E Z)^a");
  const double exponent = (1.0 - 1.0 / a) * std::pow(eps * mean_z, a / (a - 1.0)) /
                          std::pow(moment_z_a, 1.0 / (a - 1.0)) * n;
  return std::exp(-exponent);
}

WilsonInterval wilson_interval(long long successes, long long trials, double z) {
  require(trials >= 1 && successes >= 0 && successes <= trials, Errc::invalid_argument,
          "wilson_interval: bad counts");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return WilsonInterval{std::max(0.0, center - half), std::min(1.0, center + half)};
}

TailFrequency empirical_tail_frequency(const std::function<DeviationEvent(std::uint64_t)>& generator,
                                       long long replications) {
  require(replications >= 100, Errc::invalid_argument,
          "empirical_tail_frequency: need >= 100 replications");
  TailFrequency out;
  out.replications = replications;
  for (long long r = 0; r < replications; ++r) {
    const DeviationEvent ev = generator(static_cast<std::uint64_t>(r));
    if (ev.deviation >= ev.threshold) ++out.exceedances;
  }
  out.frequency = static_cast<double>(out.exceedances) / replications;
  out.interval = wilson_interval(out.exceedances, replications);
  return out;
}

std::string to_string(BoundFamily family) {
  switch (family) {
    case BoundFamily::panchenko: return "panchenko";
    case BoundFamily::self_normalized: return "self-normalized";
    case BoundFamily::uniform_deviation: return "uniform-deviation";
    case BoundFamily::lower_tail: return "lower-tail";
  }
  return "unknown";
}

std::string GeneratorSpec::name() const {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s(%g)", kind == Kind::pareto ? "pareto" : "student_t",
                parameter);
  return buf;
}

std::vector<GeneratorSpec> standard_generators() {
  return {{GeneratorSpec::Kind::pareto, 3.0},    {GeneratorSpec::Kind::pareto, 4.5},
          {GeneratorSpec::Kind::pareto, 6.0},    {GeneratorSpec::Kind::student_t, 5.0},
          {GeneratorSpec::Kind::student_t, 8.0}, {GeneratorSpec::Kind::student_t, 12.0}};
}

namespace {

// One scalar draw. Pareto variants have mean 1; student_t is symmetric with
// unit variance.
double draw(const GeneratorSpec& g, Variate& v) {
  if (g.kind == GeneratorSpec::Kind::pareto) return v.pareto_mean1(g.parameter);
  return v.student_t_std(g.parameter);
}

double generator_mean(const GeneratorSpec& g) {
  return g.kind == GeneratorSpec::Kind::pareto ? 1.0 : 0.0;
}

double generator_variance(const GeneratorSpec& g) {
  if (g.kind == GeneratorSpec::Kind::pareto) return pareto_mean1_moment(g.parameter, 2.0) - 1.0;
  return 1.0;
}

// |draw| moments for the nonnegative variants used by uniform/lower-tail.
double generator_abs_mean(const GeneratorSpec& g) {
  if (g.kind == GeneratorSpec::Kind::pareto) return 1.0;
  return student_t_std_abs_moment(g.parameter, 1.0);
}

double generator_abs_second(const GeneratorSpec& g) {
  if (g.kind == GeneratorSpec::Kind::pareto) return pareto_mean1_moment(g.parameter, 2.0);
  return 1.0;
}

}  // namespace

BoundCheckRow run_bound_check(BoundFamily family, const GeneratorSpec& generator, long long n,
                              double t_or_eps, long long replications, std::uint64_t seed) {
  require(n >= 2 && replications >= 100, Errc::invalid_argument, "run_bound_check: bad sizes");
  BoundCheckRow row;
  row.family = to_string(family);
  row.generator = generator.name();
  row.n = n;
  row.t_or_eps = t_or_eps;

  double thr_sum = 0.0, thr_max = 0.0;
  long long exceed = 0;

  switch (family) {
    case BoundFamily::panchenko: {
      // finite family of linear scores over two independent coordinates
      const std::vector<std::pair<double, double>> w = {{1.0, 0.0}, {0.5, 0.5}, {-0.4, 1.0}};
      const long long ghosts = 64;
      auto sup_score = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double best = -1e300;
        for (const auto& [wa, wb] : w) {
          double s = 0.0;
          for (std::size_t j = 0; j < a.size(); ++j) s += wa * a[j] + wb * b[j];
          best = std::max(best, s / a.size());
        }
        return best;
      };
      // control estimate of E[S] (flagged in the note)
      const long long control = 4000;
      RngStream cstream(seed, 0xc0117801ULL);
      double es = 0.0;
      std::vector<double> a(n), b(n);
      for (long long r = 0; r < control; ++r) {
        Variate v(cstream, r);
        for (long long j = 0; j < n; ++j) {
          a[j] = draw(generator, v);
          b[j] = draw(generator, v);
        }
        es += sup_score(a, b);
      }
      es /= control;
      row.note = "E[S] from 4000 control replications; V-hat from 64 ghost resamples";

      RngStream stream(seed, 0x9a9c8e20ULL);
      RngStream gstream(seed, 0x6057ULL);
      for (long long r = 0; r < replications; ++r) {
        Variate v(stream, r);
        for (long long j = 0; j < n; ++j) {
          a[j] = draw(generator, v);
          b[j] = draw(generator, v);
        }
        const double s = sup_score(a, b);
        // V-hat = E[ sup_g (1/N) sum_j (g(xi_j) - g(eta_j))^2 | xi ]
        double vhat = 0.0;
        std::vector<double> ga(n), gb(n);
        for (long long h = 0; h < ghosts; ++h) {
          Variate gv(gstream, r * ghosts + h);
          for (long long j = 0; j < n; ++j) {
            ga[j] = draw(generator, gv);
            gb[j] = draw(generator, gv);
          }
          double best = -1e300;
          for (const auto& [wa, wb] : w) {
            double q = 0.0;
            for (long long j = 0; j < n; ++j) {
              const double diff = wa * (a[j] - ga[j]) + wb * (b[j] - gb[j]);
              q += diff * diff;
            }
            best = std::max(best, q / n);
          }
          vhat += best;
        }
        vhat /= ghosts;
        const TailBound tb = panchenko_threshold(vhat, n, t_or_eps);
        thr_sum += tb.threshold;
        thr_max = std::max(thr_max, tb.threshold);
        if (s - es >= tb.threshold) ++exceed;
        row.claimed = tb.claimed_tail;
      }
      break;
    }
    case BoundFamily::self_normalized: {
      const double mean = generator_mean(generator);
      const double central = generator_variance(generator);
      RngStream stream(seed, 0x5e1f4021ULL);
      std::vector<double> g(n);
      for (long long r = 0; r < replications; ++r) {
        Variate v(stream, r);
        double sum = 0.0;
        for (long long j = 0; j < n; ++j) {
          g[j] = draw(generator, v);
          sum += g[j];
        }
        const TailBound tb = self_normalized_threshold(g, mean, central, t_or_eps);
        thr_sum += tb.threshold;
        thr_max = std::max(thr_max, tb.threshold);
        if (sum / n - mean >= tb.threshold) ++exceed;
        row.claimed = tb.claimed_tail;
      }
      break;
    }
    case BoundFamily::uniform_deviation: {
      // G(x, xi) = L(xi) x on M = [0, 1], reference point y = 0.
      SetSpec interval;
      interval.bound = Ball{Vec::Constant(1, 0.5), 0.5};
      interval.member = [](const Vec& x) { return x[0] >= 0.0 && x[0] <= 1.0; };
      const double a1 = a1_functional(interval, EntropyMethod::exact_greedy, 1e-4).value;
      const double lip_mean = generator_abs_mean(generator);
      const double lip_sq = generator_abs_second(generator);
      RngStream stream(seed, 0x4e1f0157ULL);
      for (long long r = 0; r < replications; ++r) {
        Variate v(stream, r);
        double mean_l = 0.0, mean_lsq = 0.0;
        for (long long j = 0; j < n; ++j) {
          const double l = std::abs(draw(generator, v));
          mean_l += l;
          mean_lsq += l * l;
        }
        mean_l /= n;
        mean_lsq /= n;
        const TailBound tb =
            uniform_deviation_threshold(a1, std::sqrt(mean_lsq), std::sqrt(lip_sq), n, t_or_eps);
        thr_sum += tb.threshold;
        thr_max = std::max(thr_max, tb.threshold);
        if (std::max(0.0, mean_l - lip_mean) >= tb.threshold) ++exceed;
        row.claimed = tb.claimed_tail;
      }
      row.note = "sup over [0,1] of (Phat-P)[L x]; A1 by exact-greedy";
      break;
    }
    case BoundFamily::lower_tail: {
      const double eps = t_or_eps;
      const double mean = generator_abs_mean(generator);
      const double second = generator_abs_second(generator);
      row.claimed = lower_tail_probability_bound(mean, second, 2.0, eps, n);
      row.note = kLowerTailExponentNote;
      RngStream stream(seed, 0x10e47a11ULL);
      const double thr = eps * mean;
      for (long long r = 0; r < replications; ++r) {
        Variate v(stream, r);
        double sum = 0.0;
        for (long long j = 0; j < n; ++j) sum += std::abs(draw(generator, v));
        thr_sum += thr;
        thr_max = std::max(thr_max, thr);
        if (mean - sum / n >= thr) ++exceed;
      }
      break;
    }
  }

  row.mean_threshold = thr_sum / replications;
  row.max_threshold = thr_max;
  row.frequency = static_cast<double>(exceed) / replications;
  const WilsonInterval wi = wilson_interval(exceed, replications);
  row.wilson_lo = wi.lo;
  row.wilson_hi = wi.hi;
  row.pass = row.frequency <= row.claimed + (row.wilson_hi - row.frequency);
  return row;
}

}  // namespace saa
