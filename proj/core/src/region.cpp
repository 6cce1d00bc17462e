#include "cvapprox/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "cvapprox/error.hpp"

namespace cvapprox {

bool Box::contains(std::span<const double> x, std::span<const double> tol) const {
  for (std::size_t a = 0; a < lo.size(); ++a) {
    const double t = tol.empty() ? 0.0 : tol[a];
    if (x[a] < lo[a] - t || x[a] > hi[a] + t) return false;
  }
  return true;
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t a = 0; a < lo.size(); ++a) v *= std::max(0.0, hi[a] - lo[a]);
  return v;
}

Box Box::inflated(double r) const {
  Box b = *this;
  for (std::size_t a = 0; a < lo.size(); ++a) {
    b.lo[a] -= r;
    b.hi[a] += r;
  }
  return b;
}

struct Region::Cache {
  std::once_flag once;
  PointSet grid;
};

namespace {

Box bounding(const std::vector<Box>& boxes) {
  Box bb = boxes.front();
  for (const auto& b : boxes) {
    for (std::size_t a = 0; a < bb.dim(); ++a) {
      bb.lo[a] = std::min(bb.lo[a], b.lo[a]);
      bb.hi[a] = std::max(bb.hi[a], b.hi[a]);
    }
  }
  return bb;
}

void check_boxes(const std::vector<Box>& boxes, bool allow_degenerate) {
  if (boxes.empty()) return;
  const std::size_t d = boxes.front().dim();
  if (d == 0) throw Error(ErrorKind::precondition, "box of dimension 0");
  for (const auto& b : boxes) {
    if (b.lo.size() != d || b.hi.size() != d) throw Error(ErrorKind::precondition, "box dimension mismatch");
    for (std::size_t a = 0; a < d; ++a) {
      if (!std::isfinite(b.lo[a]) || !std::isfinite(b.hi[a])) {
        throw Error(ErrorKind::precondition, "box bounds must be finite");
      }
      if (allow_degenerate ? b.lo[a] > b.hi[a] : b.lo[a] >= b.hi[a]) {
        throw Error(ErrorKind::precondition, "box must have positive extent on every axis");
      }
    }
  }
}

}  // namespace

Region::Region(std::vector<Box> boxes, const std::vector<int>& resolution) : boxes_(std::move(boxes)) {
  if (boxes_.empty()) throw Error(ErrorKind::precondition, "region needs at least one box");
  check_boxes(boxes_, false);
  const Box bb = bounding(boxes_);
  if (resolution.size() != bb.dim()) throw Error(ErrorKind::precondition, "resolution needs one entry per axis");
  origin_ = bb.lo;
  step_.resize(bb.dim());
  for (std::size_t a = 0; a < bb.dim(); ++a) {
    if (resolution[a] < 2) throw Error(ErrorKind::precondition, "grid resolution must be at least 2 per axis");
    step_[a] = (bb.hi[a] - bb.lo[a]) / (resolution[a] - 1);
  }
  cache_ = std::make_shared<Cache>();
}

Region Region::box(std::vector<double> lo, std::vector<double> hi, const std::vector<int>& resolution) {
  return Region({Box{std::move(lo), std::move(hi)}}, resolution);
}

Region Region::on_lattice(std::vector<Box> boxes, std::vector<double> origin, std::vector<double> step) {
  Region r;
  check_boxes(boxes, true);
  for (double s : step) {
    if (!(s > 0.0)) throw Error(ErrorKind::precondition, "lattice step must be positive");
  }
  if (!boxes.empty() && (boxes.front().dim() != origin.size() || step.size() != origin.size())) {
    throw Error(ErrorKind::precondition, "lattice dimension mismatch");
  }
  r.boxes_ = std::move(boxes);
  r.origin_ = std::move(origin);
  r.step_ = std::move(step);
  r.cache_ = std::make_shared<Cache>();
  return r;
}

double Region::min_step() const { return *std::min_element(step_.begin(), step_.end()); }
double Region::max_step() const { return *std::max_element(step_.begin(), step_.end()); }

bool Region::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (const auto& b : boxes_) {
    bool in = true;
    for (std::size_t a = 0; a < dim() && in; ++a) {
      const double t = 1e-9 * step_[a];
      in = x[a] >= b.lo[a] - t && x[a] <= b.hi[a] + t;
    }
    if (in) return true;
  }
  return false;
}

bool Region::contains(const Region& other) const {
  for (const auto& ob : other.boxes_) {
    bool inside = false;
    for (const auto& b : boxes_) {
      bool ok = true;
      for (std::size_t a = 0; a < dim(); ++a) {
        const double t = 1e-9 * step_[a];
        if (ob.lo[a] < b.lo[a] - t || ob.hi[a] > b.hi[a] + t) ok = false;
      }
      if (ok) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
  }
  return true;
}

Box Region::bounding_box() const {
  if (empty()) throw Error(ErrorKind::precondition, "bounding box of empty region");
  return bounding(boxes_);
}

double Region::diameter() const {
  if (empty()) return 0.0;
  const Box bb = bounding_box();
  double s = 0.0;
  for (std::size_t a = 0; a < dim(); ++a) s += (bb.hi[a] - bb.lo[a]) * (bb.hi[a] - bb.lo[a]);
  return std::sqrt(s);
}

long long Region::lattice_coord(std::size_t a, double x) const {
  return std::llround((x - origin_[a]) / step_[a]);
}

double Region::node(std::size_t a, long long k) const { return origin_[a] + static_cast<double>(k) * step_[a]; }

const PointSet& Region::grid() const {
  static const PointSet kEmpty;
  if (!cache_) return kEmpty;
  std::call_once(cache_->once, [this] {
    const std::size_t d = dim();
    PointSet pts(d);
    if (empty()) {
      cache_->grid = std::move(pts);
      return;
    }
    const Box bb = bounding(boxes_);
    std::vector<long long> kmin(d), kmax(d);
    for (std::size_t a = 0; a < d; ++a) {
      kmin[a] = static_cast<long long>(std::ceil((bb.lo[a] - origin_[a]) / step_[a] - 1e-9));
      kmax[a] = static_cast<long long>(std::floor((bb.hi[a] - origin_[a]) / step_[a] + 1e-9));
      if (kmax[a] < kmin[a]) {
        cache_->grid = std::move(pts);
        return;
      }
    }
    std::vector<long long> k = kmin;
    std::vector<double> x(d);
    while (true) {
      for (std::size_t a = 0; a < d; ++a) x[a] = node(a, k[a]);
      if (contains(x)) pts.push_back(x);
      std::size_t a = d;
      while (a > 0) {
        --a;
        if (++k[a] <= kmax[a]) break;
        k[a] = kmin[a];
        if (a == 0) {
          cache_->grid = std::move(pts);
          return;
        }
      }
    }
  });
  return cache_->grid;
}

Region Region::inflated(double r) const {
  std::vector<Box> b;
  b.reserve(boxes_.size());
  for (const auto& box : boxes_) b.push_back(box.inflated(r));
  return on_lattice(std::move(b), origin_, step_);
}

Region Region::intersected(const Box& clip) const {
  std::vector<Box> out;
  for (const auto& b : boxes_) {
    Box c = b;
    bool ok = true;
    for (std::size_t a = 0; a < dim(); ++a) {
      c.lo[a] = std::max(b.lo[a], clip.lo[a]);
      c.hi[a] = std::min(b.hi[a], clip.hi[a]);
      if (c.lo[a] > c.hi[a]) ok = false;
    }
    if (ok) out.push_back(std::move(c));
  }
  if (out.empty()) return {};
  return on_lattice(std::move(out), origin_, step_);
}

Region Region::clipped_to(const Region& other) const {
  std::vector<Box> out;
  for (const auto& ob : other.boxes_) {
    const Region part = intersected(ob);
    out.insert(out.end(), part.boxes_.begin(), part.boxes_.end());
  }
  if (out.empty()) return {};
  return on_lattice(std::move(out), origin_, step_);
}

Region Region::refined(int factor) const {
  if (factor < 1) throw Error(ErrorKind::precondition, "refinement factor must be >= 1");
  std::vector<double> s = step_;
  for (double& v : s) v /= factor;
  return on_lattice(boxes_, origin_, std::move(s));
}

Region Region::resampled(std::vector<double> step) const { return on_lattice(boxes_, origin_, std::move(step)); }

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace cvapprox

namespace cvapprox {

bool boxes_within(const Region& a, const Region& b, std::span<const double> tol) {
  if (a.boxes().size() != b.boxes().size()) return false;
  for (std::size_t i = 0; i < a.boxes().size(); ++i) {
    const auto& x = a.boxes()[i];
    const auto& y = b.boxes()[i];
    if (x.dim() != y.dim()) return false;
    for (std::size_t k = 0; k < x.dim(); ++k) {
      if (std::abs(x.lo[k] - y.lo[k]) > tol[k] || std::abs(x.hi[k] - y.hi[k]) > tol[k]) return false;
    }
  }
  return true;
}

}  // namespace cvapprox
