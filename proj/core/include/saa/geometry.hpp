#pragma once

#include <Eigen/Core>

#include <optional>

namespace saa {

using Vec = Eigen::VectorXd;

struct Ball {
  Vec center;
  double radius = 0.0;
  bool contains(const Vec& x, double tol = 0.0) const {
    return (x - center).norm() <= radius + tol;
  }
  double diameter() const { return 2.0 * radius; }
};

// Hard set Y: a box or an l2 ball. Both give exact projections, exact
// diameters and axis-aligned bounds, which the entropy and grid machinery
// rely on.
class ConvexBody {
 public:
  enum class Kind { box, ball };

  static ConvexBody box(Vec lo, Vec hi);
  static ConvexBody ball(Vec center, double radius);

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(aabb_lo_.size()); }

  bool contains(const Vec& x, double tol = 0.0) const;
  Vec project(const Vec& x) const;
  double diameter() const;
  Ball bounding_ball() const;

  // Axis-aligned bounds (exact for boxes, circumscribed for balls).
  const Vec& aabb_lo() const { return aabb_lo_; }
  const Vec& aabb_hi() const { return aabb_hi_; }

 private:
  Kind kind_ = Kind::box;
  Vec aabb_lo_, aabb_hi_;     // box bounds / ball bounding box
  Vec center_;                // ball only
  double radius_ = 0.0;       // ball only
};

}  // namespace saa
