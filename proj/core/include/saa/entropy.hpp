#pragma once

#include <functional>
#include <optional>
#include <string>

#include "saa/geometry.hpp"

namespace saa {

// Which localized set a SetSpec realizes.
enum class SetLabel {
  near_optimal,        // X*_eps
  opt_level,           // X*_{0,gamma}
  constraint_level,    // X*_{i,gamma}
  ext_opt_level,       // XX*_{0,gamma}   (exterior, within c*gamma of X)
  ext_constraint_level,// XX*_{i,gamma}
  int_opt_level,       // frak X*_{0,gamma} (levels shifted by gap(gamma))
  int_constraint_level,// frak X*_{i,gamma}
  ext_relaxation,      // XX_gamma = (X + gamma B) cap Y
  custom,
};

std::string to_string(SetLabel label);

struct SetSpec {
  std::function<bool(const Vec&)> member;
  Ball bound;                 // every member lies in this ball
  std::optional<Vec> anchor;  // interior/reference point, satisfies member
  SetLabel label = SetLabel::custom;
  int constraint_index = -1;  // for *_constraint_level labels
  double gamma = 0.0;
};

// The union with an explicit point (the uniform deviation bound's reference
// point must live in the set it is applied to); the point becomes the anchor.
SetSpec include_point(SetSpec spec, const Vec& point);

enum class EntropyMethod { exact_greedy, volumetric_bound };

// ln of the size of a maximal theta-separated packing. exact_greedy scans a
// grid of pitch <= theta/10 (d <= 3 only) and inserts greedily; nullopt when
// no grid point is accepted (empty set). volumetric_bound returns
// d ln(1 + 2 D / theta) with D the bounding-ball diameter.
std::optional<double> packing_entropy(const SetSpec& set, double theta, EntropyMethod method);

struct A1Result {
  double value = 0.0;
  int truncation_index = 0;
  double tail_majorant = 0.0;
};

// Dyadic chaining functional
//   A1 = sum_{i>=1} (3 D / 2^i) (B_i + 1),
//   B_i = sqrt(H(D/2^i) + H(D/2^{i-1}) + ln(i(i+1))),
// truncated at the first K where an analytic geometric majorant of the
// remainder drops below rel_tol times the partial sum.
A1Result a1_functional(const SetSpec& set, EntropyMethod method, double rel_tol);

}  // namespace saa
