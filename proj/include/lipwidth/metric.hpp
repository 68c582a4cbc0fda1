#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lipwidth {

/// Absolute tolerance for deciding that a norm is zero.
inline constexpr double kZeroTolerance = 1e-12;
/// Relative tolerance used when comparing certified bounds.
inline constexpr double kRelativeTolerance = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A computation could not certify its result.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

using Point = std::vector<double>;
using PointView = std::span<const double>;

enum class NormKind { L1, L2, Linf, WeightedLinf, L1Step };

std::string_view to_string(NormKind kind);
NormKind norm_kind_from_string(std::string_view name);

/// R^dim with one of a fixed list of norms.
///
/// L1Step models step functions on an interval: the space stores dim+1
/// ascending breakpoints, a point stores the value on each cell
/// [b_i, b_{i+1}), and the norm is the exact integral of |f|.
class NormedSpace {
 public:
  static NormedSpace l1(std::size_t dim);
  static NormedSpace l2(std::size_t dim);
  static NormedSpace linf(std::size_t dim);
  static NormedSpace weighted_linf(std::vector<double> weights);
  static NormedSpace l1_step(std::vector<double> breakpoints);

  std::size_t dim() const { return dim_; }
  NormKind kind() const { return kind_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  double norm(PointView x) const;
  double distance(PointView x, PointView y) const;

  /// Throws DimensionMismatch unless x.size() == dim().
  void check(PointView x) const;

  friend bool operator==(const NormedSpace&, const NormedSpace&) = default;

 private:
  NormedSpace(NormKind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

  NormKind kind_;
  std::size_t dim_;
  std::vector<double> weights_;
  std::vector<double> breakpoints_;
};

double distance(const NormedSpace& space, PointView x, PointView y);

/// Finite metric space addressed by index. Covering and packing routines
/// only need pairwise distances, so large structured sets (sparse sequence
/// sets, equidistant basis sets) implement this directly.
class MetricSet {
 public:
  virtual ~MetricSet() = default;
  virtual std::size_t size() const = 0;
  virtual double distance(std::size_t i, std::size_t j) const = 0;
};

/// Explicit point cloud in a NormedSpace; the finite stand-in for a compact set.
class FiniteSet final : public MetricSet {
 public:
  FiniteSet(NormedSpace space, std::vector<Point> points,
            std::vector<std::string> labels = {});

  const NormedSpace& space() const { return space_; }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<std::string>& labels() const { return labels_; }
  PointView point(std::size_t i) const { return points_.at(i); }

  std::size_t size() const override { return points_.size(); }
  double distance(std::size_t i, std::size_t j) const override;

  /// The set shifted by -offset.
  FiniteSet translated(PointView offset) const;

 private:
  NormedSpace space_;
  std::vector<Point> points_;
  std::vector<std::string> labels_;
};

/// Caches all pairwise distances of another MetricSet.
class DistanceMatrix final : public MetricSet {
 public:
  explicit DistanceMatrix(const MetricSet& source);

  std::size_t size() const override { return size_; }
  double distance(std::size_t i, std::size_t j) const override {
    return values_[i * size_ + j];
  }

 private:
  std::size_t size_;
  std::vector<double> values_;
};

enum class BoundDirection { Upper, Lower, Exact };

std::string_view to_string(BoundDirection direction);

struct BoundValue {
  double value = 0.0;
  BoundDirection direction = BoundDirection::Exact;
};

/// Exact maximum pairwise distance.
double diameter(const MetricSet& set);

struct RadiusBounds {
  double upper = 0.0;  ///< max distance from the best candidate center
  double lower = 0.0;  ///< diameter / 2
  Point center;
  std::optional<std::size_t> center_index;  ///< empty when the mean won
};

/// Candidate-center upper bound on the Chebyshev radius. Candidates are every
/// set point plus the coordinate-wise mean; ties go to the lowest index.
RadiusBounds radius_upper(const FiniteSet& set);

/// x + scale * y
Point axpy(PointView x, double scale, PointView y);

}  // namespace lipwidth
