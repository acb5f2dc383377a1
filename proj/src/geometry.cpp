#include "rsc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rsc {

BoundingBox::BoundingBox(double x_min, double y_min, double x_max, double y_max)
    : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max) {
  if (!std::isfinite(x_min) || !std::isfinite(y_min) || !std::isfinite(x_max) ||
      !std::isfinite(y_max)) {
    throw std::invalid_argument("bounding box coordinates must be finite");
  }
  if (!(x_min < x_max) || !(y_min < y_max)) {
    throw std::invalid_argument("bounding box must have strictly positive area");
  }
}

BoundingBox BoundingBox::translated(double dx, double dy) const {
  return BoundingBox(x_min_ + dx, y_min_ + dy, x_max_ + dx, y_max_ + dy);
}

double area(const BoundingBox& box) noexcept {
  return (box.x_max() - box.x_min()) * (box.y_max() - box.y_min());
}

double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double overlap_w =
      std::min(a.x_max(), b.x_max()) - std::max(a.x_min(), b.x_min());
  const double overlap_h =
      std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min());
  // Edge or corner contact has zero overlap area and counts as disjoint.
  if (overlap_w <= 0.0 || overlap_h <= 0.0) return 0.0;
  const double intersection = overlap_w * overlap_h;
  const double union_area = area(a) + area(b) - intersection;
  return intersection / union_area;
}

}  // namespace rsc
