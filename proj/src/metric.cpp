#include "lipwidth/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lipwidth {

std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::L1: return "l1";
    case NormKind::L2: return "l2";
    case NormKind::Linf: return "linf";
    case NormKind::WeightedLinf: return "weighted_linf";
    case NormKind::L1Step: return "l1_step";
  }
  return "unknown";
}

NormKind norm_kind_from_string(std::string_view name) {
  if (name == "l1") return NormKind::L1;
  if (name == "l2") return NormKind::L2;
  if (name == "linf") return NormKind::Linf;
  if (name == "weighted_linf") return NormKind::WeightedLinf;
  if (name == "l1_step") return NormKind::L1Step;
  throw PreconditionError("unknown norm tag '" + std::string(name) + "'");
}

std::string_view to_string(BoundDirection direction) {
  switch (direction) {
    case BoundDirection::Upper: return "upper";
    case BoundDirection::Lower: return "lower";
    case BoundDirection::Exact: return "exact";
  }
  return "unknown";
}

namespace {

void require_positive_dim(std::size_t dim) {
  if (dim == 0) throw PreconditionError("normed space dimension must be positive");
}

}  // namespace

NormedSpace NormedSpace::l1(std::size_t dim) {
  require_positive_dim(dim);
  return {NormKind::L1, dim};
}

NormedSpace NormedSpace::l2(std::size_t dim) {
  require_positive_dim(dim);
  return {NormKind::L2, dim};
}

NormedSpace NormedSpace::linf(std::size_t dim) {
  require_positive_dim(dim);
  return {NormKind::Linf, dim};
}

NormedSpace NormedSpace::weighted_linf(std::vector<double> weights) {
  require_positive_dim(weights.size());
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw PreconditionError("weighted_linf weights must be positive and finite");
  }
  NormedSpace space(NormKind::WeightedLinf, weights.size());
  space.weights_ = std::move(weights);
  return space;
}

NormedSpace NormedSpace::l1_step(std::vector<double> breakpoints) {
  if (breakpoints.size() < 2)
    throw PreconditionError("l1_step needs at least two breakpoints");
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > breakpoints[i - 1]))
      throw PreconditionError("l1_step breakpoints must be strictly increasing");
  }
  NormedSpace space(NormKind::L1Step, breakpoints.size() - 1);
  space.breakpoints_ = std::move(breakpoints);
  return space;
}

void NormedSpace::check(PointView x) const {
  if (x.size() != dim_) {
    throw DimensionMismatch("point has dimension " + std::to_string(x.size()) +
                            ", space has dimension " + std::to_string(dim_));
  }
}

double NormedSpace::norm(PointView x) const {
  check(x);
  double acc = 0.0;
  switch (kind_) {
    case NormKind::L1:
      for (double v : x) acc += std::abs(v);
      return acc;
    case NormKind::L2:
      for (double v : x) acc += v * v;
      return std::sqrt(acc);
    case NormKind::Linf:
      for (double v : x) acc = std::max(acc, std::abs(v));
      return acc;
    case NormKind::WeightedLinf:
      for (std::size_t i = 0; i < dim_; ++i) acc = std::max(acc, weights_[i] * std::abs(x[i]));
      return acc;
    case NormKind::L1Step:
      for (std::size_t i = 0; i < dim_; ++i)
        acc += std::abs(x[i]) * (breakpoints_[i + 1] - breakpoints_[i]);
      return acc;
  }
  return acc;
}

double NormedSpace::distance(PointView x, PointView y) const {
  check(x);
  check(y);
  double acc = 0.0;
  switch (kind_) {
    case NormKind::L1:
      for (std::size_t i = 0; i < dim_; ++i) acc += std::abs(x[i] - y[i]);
      return acc;
    case NormKind::L2:
      for (std::size_t i = 0; i < dim_; ++i) {
        const double d = x[i] - y[i];
        acc += d * d;
      }
      return std::sqrt(acc);
    case NormKind::Linf:
      for (std::size_t i = 0; i < dim_; ++i) acc = std::max(acc, std::abs(x[i] - y[i]));
      return acc;
    case NormKind::WeightedLinf:
      for (std::size_t i = 0; i < dim_; ++i)
        acc = std::max(acc, weights_[i] * std::abs(x[i] - y[i]));
      return acc;
    case NormKind::L1Step:
      for (std::size_t i = 0; i < dim_; ++i)
        acc += std::abs(x[i] - y[i]) * (breakpoints_[i + 1] - breakpoints_[i]);
      return acc;
  }
  return acc;
}

double distance(const NormedSpace& space, PointView x, PointView y) {
  return space.distance(x, y);
}

FiniteSet::FiniteSet(NormedSpace space, std::vector<Point> points,
                     std::vector<std::string> labels)
    : space_(std::move(space)), points_(std::move(points)), labels_(std::move(labels)) {
  for (const auto& p : points_) space_.check(p);
  if (!labels_.empty() && labels_.size() != points_.size())
    throw PreconditionError("labels must be empty or match the number of points");
}

double FiniteSet::distance(std::size_t i, std::size_t j) const {
  return space_.distance(points_.at(i), points_.at(j));
}

FiniteSet FiniteSet::translated(PointView offset) const {
  space_.check(offset);
  std::vector<Point> shifted;
  shifted.reserve(points_.size());
  for (const auto& p : points_) shifted.push_back(axpy(p, -1.0, offset));
  return {space_, std::move(shifted), labels_};
}

DistanceMatrix::DistanceMatrix(const MetricSet& source)
    : size_(source.size()), values_(source.size() * source.size(), 0.0) {
  for (std::size_t i = 0; i < size_; ++i) {
    for (std::size_t j = i + 1; j < size_; ++j) {
      const double d = source.distance(i, j);
      values_[i * size_ + j] = d;
      values_[j * size_ + i] = d;
    }
  }
}

double diameter(const MetricSet& set) {
  if (set.size() == 0) throw PreconditionError("diameter of an empty set");
  double best = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = i + 1; j < set.size(); ++j) best = std::max(best, set.distance(i, j));
  return best;
}

RadiusBounds radius_upper(const FiniteSet& set) {
  if (set.size() == 0) throw PreconditionError("radius of an empty set");
  const auto& space = set.space();

  auto eccentricity = [&](PointView c) {
    double r = 0.0;
    for (const auto& p : set.points()) r = std::max(r, space.distance(c, p));
    return r;
  };

  RadiusBounds out;
  out.upper = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double r = eccentricity(set.point(i));
    if (r < out.upper) {
      out.upper = r;
      out.center = set.points()[i];
      out.center_index = i;
    }
  }

  Point mean(space.dim(), 0.0);
  for (const auto& p : set.points())
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += p[k];
  for (double& v : mean) v /= static_cast<double>(set.size());
  const double r_mean = eccentricity(mean);
  if (r_mean < out.upper) {
    out.upper = r_mean;
    out.center = std::move(mean);
    out.center_index.reset();
  }

  out.lower = diameter(set) / 2.0;
  return out;
}

Point axpy(PointView x, double scale, PointView y) {
  if (x.size() != y.size()) throw DimensionMismatch("axpy operands differ in dimension");
  Point out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += scale * y[i];
  return out;
}

}  // namespace lipwidth
