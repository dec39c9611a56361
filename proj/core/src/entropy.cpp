#include "saa/entropy.hpp"

#include <cmath>
#include <unordered_map>
#include <vector>

#include "saa/error.hpp"

namespace saa {

std::string to_string(SetLabel label) {
  switch (label) {
    case SetLabel::near_optimal: return "near_optimal";
    case SetLabel::opt_level: return "opt_level";
    case SetLabel::constraint_level: return "constraint_level";
    case SetLabel::ext_opt_level: return "ext_opt_level";
    case SetLabel::ext_constraint_level: return "ext_constraint_level";
    case SetLabel::int_opt_level: return "int_opt_level";
    case SetLabel::int_constraint_level: return "int_constraint_level";
    case SetLabel::ext_relaxation: return "ext_relaxation";
    case SetLabel::custom: return "custom";
  }
  return "unknown";
}

SetSpec include_point(SetSpec spec, const Vec& point) {
  require(spec.bound.contains(point, 1e-9), Errc::invalid_argument,
          "include_point: point outside bounding ball");
  auto inner = spec.member;
  const Vec a = point;
  spec.member = [inner, a](const Vec& x) { return (x - a).norm() <= 1e-12 || inner(x); };
  spec.anchor = a;
  return spec;
}

namespace {

// Greedy insertion over a grid of pitch <= theta/10; accepted points are
// bucketed into theta-sized cells so each candidate only checks its 3^d
// neighborhood.
double greedy_entropy(const SetSpec& set, double theta) {
  const int d = static_cast<int>(set.bound.center.size());
  require(d <= 3, Errc::invalid_argument, "packing_entropy: exact-greedy needs d <= 3");

  const Vec lo = set.bound.center.array() - set.bound.radius;
  const Vec hi = set.bound.center.array() + set.bound.radius;
  const double pitch = theta / 10.0;
  std::vector<int> counts(d);
  long long total = 1;
  for (int k = 0; k < d; ++k) {
    counts[k] = static_cast<int>(std::floor((hi[k] - lo[k]) / pitch + 1e-12)) + 1;
    total *= counts[k];
  }
  require(total <= 80'000'000LL, Errc::invalid_argument,
          "packing_entropy: grid too large for exact-greedy at this theta");

  std::unordered_map<long long, std::vector<Vec>> cells;
  auto cell_of = [&](const Vec& x) {
    long long key = 0;
    for (int k = 0; k < d; ++k) {
      const long long c = static_cast<long long>(std::floor((x[k] - lo[k]) / theta)) + 1;
      key = key * 2'000'003LL + c;
    }
    return key;
  };
  auto cell_key = [&](const std::vector<long long>& c) {
    long long key = 0;
    for (int k = 0; k < d; ++k) key = key * 2'000'003LL + c[k];
    return key;
  };

  long long accepted = 0;
  Vec x(d);
  std::vector<long long> base(d), nb(d);
  for (long long idx = 0; idx < total; ++idx) {
    long long rem = idx;
    for (int k = 0; k < d; ++k) {
      const int ik = static_cast<int>(rem % counts[k]);
      rem /= counts[k];
      x[k] = (counts[k] == 1) ? lo[k] : lo[k] + (hi[k] - lo[k]) * ik / (counts[k] - 1);
    }
    if (!set.bound.contains(x, 1e-12) || !set.member(x)) continue;
    for (int k = 0; k < d; ++k)
      base[k] = static_cast<long long>(std::floor((x[k] - lo[k]) / theta)) + 1;
    bool separated = true;
    const int neighborhood = d == 1 ? 3 : (d == 2 ? 9 : 27);
    for (int n = 0; n < neighborhood && separated; ++n) {
      int rem2 = n;
      for (int k = 0; k < d; ++k) {
        nb[k] = base[k] + (rem2 % 3) - 1;
        rem2 /= 3;
      }
      auto it = cells.find(cell_key(nb));
      if (it == cells.end()) continue;
      for (const Vec& p : it->second) {
        if ((x - p).norm() <= theta) {
          separated = false;
          break;
        }
      }
    }
    if (separated) {
      cells[cell_of(x)].push_back(x);
      ++accepted;
    }
  }
  if (accepted == 0) return -1.0;  // sentinel: empty set
  return std::log(static_cast<double>(accepted));
}

}  // namespace

std::optional<double> packing_entropy(const SetSpec& set, double theta, EntropyMethod method) {
  require(theta > 0.0, Errc::invalid_argument, "packing_entropy: theta must be > 0");
  const double diam = set.bound.diameter();
  if (method == EntropyMethod::volumetric_bound) {
    const int d = static_cast<int>(set.bound.center.size());
    if (diam <= 0.0) return 0.0;
    return d * std::log1p(2.0 * diam / theta);
  }
  if (diam <= 0.0) {
    // degenerate ball: the set is at most one point
    return set.member(set.bound.center) ? std::optional<double>(0.0) : std::nullopt;
  }
  const double h = greedy_entropy(set, theta);
  if (h < 0.0) return std::nullopt;
  return h;
}

A1Result a1_functional(const SetSpec& set, EntropyMethod method, double rel_tol) {
  require(rel_tol > 0.0 && rel_tol <= 1e-3, Errc::invalid_argument,
          "a1_functional: tolerance must be in (0, 1e-3]");
  const double diam = set.bound.diameter();
  A1Result out;
  if (diam <= 0.0) return out;  // singleton: every term vanishes

  const int d = static_cast<int>(set.bound.center.size());
  // Majorant of term_i under volumetric entropy (dominates exact-greedy too):
  //   term_i <= (3D/2^i)(sqrt(2d(i+2)) + sqrt(2 ln(i+1)) + 1) =: M_i,
  // and sum_{i>K} M_i <= 4 M_K (the ratio M_{i+1}/M_i is < 0.63 for i >= 1).
  auto majorant = [&](int i) {
    return 3.0 * diam / std::pow(2.0, i) *
           (std::sqrt(2.0 * d * (i + 2)) + std::sqrt(2.0 * std::log(i + 1.0)) + 1.0);
  };

  double partial = 0.0;
  double h_coarse = packing_entropy(set, diam, method).value_or(0.0);  // H(D/2^0)
  int i = 0;
  for (;;) {
    ++i;
    require(i <= 4000, Errc::invalid_argument, "a1_functional: majorant failed to converge");
    const double theta_i = diam / std::pow(2.0, i);
    const double h_fine = packing_entropy(set, theta_i, method).value_or(0.0);
    const double b = std::sqrt(h_fine + h_coarse + std::log(static_cast<double>(i) * (i + 1)));
    partial += 3.0 * diam / std::pow(2.0, i) * (b + 1.0);
    h_coarse = h_fine;
    const double tail = 4.0 * majorant(i);
    if (tail <= rel_tol * partial) {
      out.value = partial;
      out.truncation_index = i;
      out.tail_majorant = tail;
      return out;
    }
  }
}

}  // namespace saa
