// metric_core.hpp
//
// Finite metric spaces, greedy/exact epsilon-nets, covering numbers and
// increasing dyadic partition hierarchies. Everything here is a pure
// function of its inputs; returned values are immutable after construction.
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace chainmi {

inline constexpr double kDefaultMetricTol = 1e-9;
inline constexpr std::size_t kDefaultExactCoverCap = 20;

using Matrix = std::vector<std::vector<double>>;

/// A validated (pseudo)metric on points 0..n-1. Off-diagonal zeros are
/// allowed so that the generalization-error metric, which may identify
/// distinct hypotheses, fits here too.
class FiniteMetricSpace {
 public:
  static FiniteMetricSpace validate(const Matrix& dist, double tol_metric = kDefaultMetricTol);

  /// Euclidean distances between the given coordinates; coordinates are kept.
  static FiniteMetricSpace from_points(const Matrix& coords);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return dist_[i * n_ + j]; }
  double diameter() const noexcept { return diameter_; }
  bool has_coordinates() const noexcept { return !coords_.empty(); }
  const Matrix& coordinates() const noexcept { return coords_; }
  Matrix distance_matrix() const;

  /// Restriction to the listed points (in the listed order).
  FiniteMetricSpace subspace(std::span<const std::size_t> ids) const;

 private:
  FiniteMetricSpace() = default;

  std::size_t n_ = 0;
  std::vector<double> dist_;
  double diameter_ = 0.0;
  Matrix coords_;
};

FiniteMetricSpace validate_metric(const Matrix& dist, double tol_metric = kDefaultMetricTol);

/// `count` points equally spaced on the unit circle, point i at phase 2*pi*i/count
/// with coordinates (sin phase, cos phase) and chord distances.
FiniteMetricSpace equispaced_circle(std::size_t count);

/// True when 2^{-(k-1)} >= diameter, i.e. k is an admissible first level.
bool admits_base_scale(int k, double diameter) noexcept;

/// Largest k with 2^{-(k-1)} >= diameter. Throws DegenerateSpace on diameter 0.
int base_scale_index(const FiniteMetricSpace& space);

struct EpsilonNet {
  double scale = 0.0;
  std::vector<std::size_t> centers;     // ascending point ids
  std::vector<std::size_t> projection;  // point id -> center point id
};

/// Centers are admitted in index order whenever a point is farther than
/// `scale` from every current center; points project to the nearest center
/// (lowest center id on ties).
EpsilonNet greedy_epsilon_net(const FiniteMetricSpace& space, double scale);

bool is_epsilon_net(const FiniteMetricSpace& space, const EpsilonNet& net);

enum class CoverMode { Greedy, Exact };

std::size_t covering_number(const FiniteMetricSpace& space, double scale, CoverMode mode,
                            std::size_t exact_cap = kDefaultExactCoverCap);

struct PartitionLevel {
  int k = 0;
  std::vector<std::size_t> cell_of;         // point id -> cell id
  std::vector<std::size_t> center_of_cell;  // cell id -> tagged center point id
  std::vector<std::size_t> parent_of_cell;  // cell id -> cell id at level k-1 (empty at k_min)

  std::size_t cell_count() const noexcept { return center_of_cell.size(); }
};

/// Increasing sequence of 2^{-k}-partitions for k = k_min..k_max.
class PartitionHierarchy {
 public:
  PartitionHierarchy(int k_min, std::vector<PartitionLevel> levels);

  int k_min() const noexcept { return k_min_; }
  int k_max() const noexcept { return k_min_ + static_cast<int>(levels_.size()) - 1; }
  const PartitionLevel& level(int k) const;
  std::size_t cell(std::size_t t, int k) const { return level(k).cell_of[t]; }
  std::size_t center(std::size_t t, int k) const;
  std::size_t cell_count(int k) const { return level(k).cell_count(); }

 private:
  int k_min_;
  std::vector<PartitionLevel> levels_;
};

/// Nets at scales 2^{-k}; level k+1 cells are the nonempty intersections of
/// the raw projection cells with the level-k cells, so refinement holds by
/// construction. Throws ScaleMismatch when k_min violates the diameter condition.
PartitionHierarchy build_dyadic_hierarchy(const FiniteMetricSpace& space, int k_min, int k_max);

/// Empty when every hierarchy invariant holds; otherwise one message per violation.
std::vector<std::string> hierarchy_violations(const FiniteMetricSpace& space,
                                              const PartitionHierarchy& hierarchy,
                                              double tol = kDefaultMetricTol);

/// Analytic dyadic arcs on the unit circle: level k has 2^{k+2} arcs of
/// length 2*pi/2^{k+2}; returns the arc index containing `phase`.
std::size_t circle_dyadic_partition(int k, double phase);

/// Midpoint phase of arc `cell` at level k.
double circle_cell_center(int k, std::size_t cell);

}  // namespace chainmi
