#pragma once

#include <cstdint>

namespace saa {

// splitmix64 finalizer; full-period, good avalanche.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based random stream keyed by (seed, stream). Every 64-bit word is a
// pure function of (seed, stream, counter, slot), so scenario j can be drawn
// independently of scenarios 0..j-1 and parallel generation is
// order-independent.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64(splitmix64(seed) ^ (splitmix64(stream) * 0x9e3779b97f4a7c15ULL + 1))) {}

  std::uint64_t word(std::uint64_t counter, std::uint64_t slot) const {
    return splitmix64(splitmix64(key_ ^ (counter * 0xd1342543de82ef95ULL)) ^
                      (slot * 0xaf251af3b0f025b5ULL + 0x2545f4914f6cdd1dULL));
  }

  // Uniform in the open interval (0,1); safe under log().
  double u01(std::uint64_t counter, std::uint64_t slot) const {
    return (static_cast<double>(word(counter, slot) >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

// Sequential variate source for one counter of a stream. Rejection-based
// samplers may consume a variable number of slots; the sequence is still a
// deterministic function of (seed, stream, counter).
class Variate {
 public:
  Variate(const RngStream& stream, std::uint64_t counter)
      : stream_(&stream), counter_(counter), slot_(0) {}

  double u01() { return stream_->u01(counter_, slot_++); }
  double uniform(double a, double b) { return a + (b - a) * u01(); }

  double normal();
  // Marsaglia-Tsang; requires shape >= 1.
  double gamma(double shape);
  double chi_square(double dof) { return 2.0 * gamma(dof / 2.0); }
  double student_t(double dof);
  // Student-t scaled to unit variance (dof > 2).
  double student_t_std(double dof);
  // Pareto with scale x_m = 1: x = u^{-1/alpha}.
  double pareto(double alpha) { return pareto_scaled(alpha, 1.0); }
  // Pareto with scale (alpha-1)/alpha, so the mean is exactly 1.
  double pareto_mean1(double alpha) { return pareto_scaled(alpha, (alpha - 1.0) / alpha); }
  double pareto_scaled(double alpha, double xm);

 private:
  const RngStream* stream_;
  std::uint64_t counter_;
  std::uint64_t slot_;
};

// Closed-form moments used by population oracles.
// E[X^k] for X ~ Pareto(alpha) with scale chosen so E[X] = 1; requires k < alpha.
double pareto_mean1_moment(double alpha, double k);
// E|T|^k for Student-t with dof nu, scaled to unit variance; requires k < nu.
double student_t_std_abs_moment(double nu, double k);

}  // namespace saa
