#include "saa/geometry.hpp"

#include "saa/error.hpp"

namespace saa {

ConvexBody ConvexBody::box(Vec lo, Vec hi) {
  require(lo.size() == hi.size() && lo.size() >= 1, Errc::invalid_argument, "box: bad bounds");
  for (int k = 0; k < lo.size(); ++k)
    require(lo[k] <= hi[k], Errc::invalid_argument, "box: lo > hi");
  ConvexBody b;
  b.kind_ = Kind::box;
  b.aabb_lo_ = std::move(lo);
  b.aabb_hi_ = std::move(hi);
  return b;
}

ConvexBody ConvexBody::ball(Vec center, double radius) {
  require(center.size() >= 1 && radius > 0.0, Errc::invalid_argument, "ball: bad parameters");
  ConvexBody b;
  b.kind_ = Kind::ball;
  b.center_ = center;
  b.radius_ = radius;
  b.aabb_lo_ = center.array() - radius;
  b.aabb_hi_ = center.array() + radius;
  return b;
}

bool ConvexBody::contains(const Vec& x, double tol) const {
  if (kind_ == Kind::box) {
    for (int k = 0; k < x.size(); ++k)
      if (x[k] < aabb_lo_[k] - tol || x[k] > aabb_hi_[k] + tol) return false;
    return true;
  }
  return (x - center_).norm() <= radius_ + tol;
}

Vec ConvexBody::project(const Vec& x) const {
  if (kind_ == Kind::box) return x.cwiseMax(aabb_lo_).cwiseMin(aabb_hi_);
  const double r = (x - center_).norm();
  if (r <= radius_) return x;
  return center_ + (radius_ / r) * (x - center_);
}

double ConvexBody::diameter() const {
  if (kind_ == Kind::box) return (aabb_hi_ - aabb_lo_).norm();
  return 2.0 * radius_;
}

Ball ConvexBody::bounding_ball() const {
  if (kind_ == Kind::box) return Ball{0.5 * (aabb_lo_ + aabb_hi_), 0.5 * (aabb_hi_ - aabb_lo_).norm()};
  return Ball{center_, radius_};
}

}  // namespace saa
