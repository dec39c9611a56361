#pragma once

#include <functional>
#include <string>
#include <vector>

#include "saa/rng.hpp"

namespace saa {

struct TailBound {
  std::string name;          // panchenko | self-normalized | uniform-deviation | lower-tail
  double threshold = 0.0;
  double claimed_tail = 0.0;  // in (0, 2]
  long long n = 0;
  double t = 0.0;             // t or eps, whichever parameterizes the bound
};

// threshold = sqrt(2 (1+t) V-hat / N), tail 2 e^{-t} per side.
TailBound panchenko_threshold(double v_hat, long long n, double t);

// threshold = sqrt( (2 (1+t) / N) (P-hat + P)[g - Pg]^2 ), tail 2 e^{-t} per
// side of (P-hat - P) g. The sample supplies the P-hat part; the population
// mean and second central moment come in closed form.
TailBound self_normalized_threshold(const std::vector<double>& g_samples, double pop_mean,
                                    double pop_central_second, double t);

// threshold = 2 a1 sqrt((1+t)(Lhat^2 + L^2)/N), tail 2 e^{-t} per side.
TailBound uniform_deviation_threshold(double a1, double lip_hat, double lip, long long n,
                                      double t);

// P{ mean_N Z <= (1 - eps) E Z } bound with the exponent from the proof's
// theta* optimization:
//   exp{ -(1 - 1/a) (eps E Z)^{a/(a-1)} / (E Z^a)^{1/(a-1)} N }.
// The lemma's displayed exponent eps^{(a-1)/a} differs; callers can surface
// the discrepancy flag alongside the bound.
double lower_tail_probability_bound(double mean_z, double moment_z_a, double a, double eps,
                                    long long n);
inline constexpr const char* kLowerTailExponentNote =
    "exponent follows the theta*-optimized form eps^{a/(a-1)}, not the displayed eps^{(a-1)/a}";

struct WilsonInterval {
  double lo = 0.0, hi = 1.0;
};
WilsonInterval wilson_interval(long long successes, long long trials, double z = 1.959963984540054);

struct TailFrequency {
  double frequency = 0.0;
  WilsonInterval interval;
  long long replications = 0;
  long long exceedances = 0;
};

struct DeviationEvent {
  double deviation = 0.0;
  double threshold = 0.0;
};

// Fraction of replications with deviation >= threshold, plus a 95% Wilson
// interval. The generator is keyed by replication index, so replications are
// schedule-independent.
TailFrequency empirical_tail_frequency(const std::function<DeviationEvent(std::uint64_t)>& generator,
                                       long long replications);

// --- Monte Carlo falsification harness --------------------------------------

enum class BoundFamily { panchenko, self_normalized, uniform_deviation, lower_tail };
std::string to_string(BoundFamily family);

// Heavy-tailed generators used across the bound checks.
struct GeneratorSpec {
  enum class Kind { pareto, student_t } kind = Kind::pareto;
  double parameter = 4.5;  // tail index or dof
  std::string name() const;
};
std::vector<GeneratorSpec> standard_generators();  // pareto 3, 4.5, 6; t 5, 8, 12

struct BoundCheckRow {
  std::string family;
  std::string generator;
  long long n = 0;
  double t_or_eps = 0.0;
  double mean_threshold = 0.0;
  double max_threshold = 0.0;
  double frequency = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  double claimed = 0.0;
  bool pass = false;  // frequency <= claimed + Wilson upper slack
  std::string note;
};

// Runs one (family, generator, t-or-eps) cell with per-replication thresholds.
BoundCheckRow run_bound_check(BoundFamily family, const GeneratorSpec& generator, long long n,
                              double t_or_eps, long long replications, std::uint64_t seed);

}  // namespace saa
