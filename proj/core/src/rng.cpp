#include "saa/rng.hpp"

#include <cmath>

#include "saa/error.hpp"

namespace saa {

double Variate::normal() {
  const double u1 = u01();
  const double u2 = u01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Variate::gamma(double shape) {
  require(shape >= 1.0, Errc::invalid_argument, "gamma: shape must be >= 1");
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = u01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Variate::student_t(double dof) {
  const double z = normal();
  const double v = chi_square(dof);
  return z / std::sqrt(v / dof);
}

double Variate::student_t_std(double dof) {
  require(dof > 2.0, Errc::invalid_argument, "student_t_std: dof must exceed 2");
  return student_t(dof) / std::sqrt(dof / (dof - 2.0));
}

double Variate::pareto_scaled(double alpha, double xm) {
  require(alpha > 0.0 && xm > 0.0, Errc::invalid_argument, "pareto: bad parameters");
  return xm * std::pow(u01(), -1.0 / alpha);
}

double pareto_mean1_moment(double alpha, double k) {
  require(k < alpha, Errc::invalid_argument, "pareto moment: k must be < alpha");
  const double xm = (alpha - 1.0) / alpha;
  return alpha * std::pow(xm, k) / (alpha - k);
}

double student_t_std_abs_moment(double nu, double k) {
  require(k < nu && nu > 2.0, Errc::invalid_argument, "t moment: need 2 < nu, k < nu");
  // E|T|^k = nu^{k/2} Gamma((k+1)/2) Gamma((nu-k)/2) / (sqrt(pi) Gamma(nu/2))
  const double raw = std::exp(0.5 * k * std::log(nu) + std::lgamma((k + 1.0) / 2.0) +
                              std::lgamma((nu - k) / 2.0) - 0.5 * std::log(M_PI) -
                              std::lgamma(nu / 2.0));
  return raw / std::pow(nu / (nu - 2.0), k / 2.0);
}

}  // namespace saa
