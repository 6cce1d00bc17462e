#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace cvapprox {

/// Closed axis-aligned box.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const noexcept { return lo.size(); }
  bool contains(std::span<const double> x, std::span<const double> tol = {}) const;
  double volume() const;
  Box inflated(double r) const;
  bool operator==(const Box&) const = default;
};

/// Flat storage for a list of points of equal dimension.
class PointSet {
 public:
  explicit PointSet(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const noexcept { return coords_.empty(); }
  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  void push_back(std::span<const double> x) { coords_.insert(coords_.end(), x.begin(), x.end()); }
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }
  const std::vector<double>& raw() const noexcept { return coords_; }

 private:
  std::size_t dim_;
  std::vector<double> coords_;
};

/// Finite union of closed boxes sampled on one uniform lattice
/// (nodes origin + k * step). Grid points are the lattice nodes lying in
/// some box, enumerated with the last axis fastest.
class Region {
 public:
  /// The empty region.
  Region() = default;
  /// Lattice anchored at the lower corner of the bounding box, with
  /// `resolution[a]` nodes across it on axis a.
  Region(std::vector<Box> boxes, const std::vector<int>& resolution);

  static Region box(std::vector<double> lo, std::vector<double> hi, const std::vector<int>& resolution);
  /// Boxes sampled on an existing lattice. Boxes may be degenerate.
  static Region on_lattice(std::vector<Box> boxes, std::vector<double> origin, std::vector<double> step);

  bool empty() const noexcept { return boxes_.empty(); }
  std::size_t dim() const noexcept { return origin_.size(); }
  const std::vector<Box>& boxes() const noexcept { return boxes_; }
  std::span<const double> step() const noexcept { return step_; }
  std::span<const double> origin() const noexcept { return origin_; }
  double min_step() const;
  double max_step() const;

  /// Closed membership with a tolerance of 1e-9 lattice steps.
  bool contains(std::span<const double> x) const;
  bool contains(const Region& other) const;  // every box of other inside some box here
  Box bounding_box() const;
  double diameter() const;

  const PointSet& grid() const;
  std::size_t grid_size() const { return grid().size(); }

  Region inflated(double r) const;
  Region intersected(const Box& b) const;
  Region clipped_to(const Region& other) const;  // pairwise box intersections
  /// Same boxes on a lattice with step / factor.
  Region refined(int factor) const;
  /// Same boxes on a lattice with the given step, anchored at the old origin.
  Region resampled(std::vector<double> step) const;

  /// Lattice coordinate of node nearest to x along axis a.
  long long lattice_coord(std::size_t a, double x) const;
  double node(std::size_t a, long long k) const;

  bool operator==(const Region& o) const {
    return boxes_ == o.boxes_ && origin_ == o.origin_ && step_ == o.step_;
  }

 private:
  struct Cache;
  std::vector<Box> boxes_;
  std::vector<double> origin_;
  std::vector<double> step_;
  std::shared_ptr<Cache> cache_;
};

double distance(std::span<const double> a, std::span<const double> b);

}  // namespace cvapprox

namespace cvapprox {

/// Same number of boxes, and matching box bounds within tol[a] on axis a.
bool boxes_within(const Region& a, const Region& b, std::span<const double> tol);

}  // namespace cvapprox
