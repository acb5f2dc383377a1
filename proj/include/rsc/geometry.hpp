#pragma once

namespace rsc {

// Axis-aligned bounding box in continuous image coordinates.
// Invariants: x_min < x_max, y_min < y_max, all coordinates finite.
class BoundingBox {
 public:
  BoundingBox(double x_min, double y_min, double x_max, double y_max);

  double x_min() const noexcept { return x_min_; }
  double y_min() const noexcept { return y_min_; }
  double x_max() const noexcept { return x_max_; }
  double y_max() const noexcept { return y_max_; }

  BoundingBox translated(double dx, double dy) const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

 private:
  double x_min_;
  double y_min_;
  double x_max_;
  double y_max_;
};

double area(const BoundingBox& box) noexcept;

// Intersection over union in [0, 1]. Disjoint boxes and boxes touching only
// along an edge or corner score 0; a box against itself scores exactly 1.
double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

}  // namespace rsc
