#include "chainmi/metric_core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <sstream>

#include "chainmi/error.hpp"

namespace chainmi {

namespace {

std::string triple(std::size_t i, std::size_t j, std::size_t k) {
  std::ostringstream os;
  os << "(" << i << ", " << j << ", " << k << ")";
  return os.str();
}

}  // namespace

FiniteMetricSpace FiniteMetricSpace::validate(const Matrix& dist, double tol_metric) {
  if (!(tol_metric >= 0.0)) throw Error(Errc::InvalidArgument, "tol_metric must be nonnegative");
  const std::size_t n = dist.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (dist[i].size() != n) {
      throw Error(Errc::NotSquare, "row " + std::to_string(i) + " has " +
                                       std::to_string(dist[i].size()) + " entries, expected " +
                                       std::to_string(n));
    }
  }

  FiniteMetricSpace space;
  space.n_ = n;
  space.dist_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = dist[i][j];
      if (!std::isfinite(d)) {
        throw MetricError(Errc::NonFinite, i, j, j, "entry " + triple(i, j, j) + " is not finite");
      }
      if (d < 0.0) {
        throw MetricError(Errc::NegativeDistance, i, j, j,
                          "negative distance at " + triple(i, j, j));
      }
      space.dist_[i * n + j] = d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (space.dist_[i * n + i] != 0.0) {
      throw MetricError(Errc::NonzeroSelfDistance, i, i, i,
                        "dist[i][i] != 0 at " + triple(i, i, i));
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(space.dist_[i * n + j] - space.dist_[j * n + i]) > tol_metric) {
        throw MetricError(Errc::AsymmetricDistance, i, j, j,
                          "dist[i][j] != dist[j][i] at " + triple(i, j, j));
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dij = space.dist_[i * n + j];
      for (std::size_t k = 0; k < n; ++k) {
        if (space.dist_[i * n + k] > dij + space.dist_[j * n + k] + tol_metric) {
          throw MetricError(Errc::TriangleViolation, i, j, k,
                            "d(i,k) > d(i,j) + d(j,k) at " + triple(i, j, k));
        }
      }
    }
  }
  space.diameter_ = n == 0 ? 0.0 : *std::max_element(space.dist_.begin(), space.dist_.end());
  return space;
}

FiniteMetricSpace FiniteMetricSpace::from_points(const Matrix& coords) {
  const std::size_t n = coords.size();
  Matrix dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    if (coords[i].size() != coords.front().size()) {
      throw Error(Errc::InvalidArgument, "points must share one dimension");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < coords[i].size(); ++c) {
        const double diff = coords[i][c] - coords[j][c];
        s += diff * diff;
      }
      dist[i][j] = dist[j][i] = std::sqrt(s);
    }
  }
  FiniteMetricSpace space = validate(dist);
  space.coords_ = coords;
  return space;
}

Matrix FiniteMetricSpace::distance_matrix() const {
  Matrix out(n_, std::vector<double>(n_));
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) out[i][j] = dist_[i * n_ + j];
  }
  return out;
}

FiniteMetricSpace FiniteMetricSpace::subspace(std::span<const std::size_t> ids) const {
  FiniteMetricSpace sub;
  sub.n_ = ids.size();
  sub.dist_.resize(sub.n_ * sub.n_);
  for (std::size_t a = 0; a < ids.size(); ++a) {
    if (ids[a] >= n_) throw Error(Errc::InvalidArgument, "subspace id out of range");
    for (std::size_t b = 0; b < ids.size(); ++b) {
      sub.dist_[a * sub.n_ + b] = (*this)(ids[a], ids[b]);
    }
    if (!coords_.empty()) sub.coords_.push_back(coords_[ids[a]]);
  }
  sub.diameter_ = sub.dist_.empty() ? 0.0 : *std::max_element(sub.dist_.begin(), sub.dist_.end());
  return sub;
}

FiniteMetricSpace validate_metric(const Matrix& dist, double tol_metric) {
  return FiniteMetricSpace::validate(dist, tol_metric);
}

FiniteMetricSpace equispaced_circle(std::size_t count) {
  Matrix coords;
  coords.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
    coords.push_back({std::sin(phase), std::cos(phase)});
  }
  return FiniteMetricSpace::from_points(coords);
}

bool admits_base_scale(int k, double diameter) noexcept {
  return std::ldexp(1.0, -(k - 1)) >= diameter;
}

int base_scale_index(const FiniteMetricSpace& space) {
  const double diam = space.diameter();
  if (!(diam > 0.0)) throw Error(Errc::DegenerateSpace, "diameter is zero");
  int k = static_cast<int>(std::floor(1.0 - std::log2(diam)));
  // log2 may be off by an ulp at exact powers of two.
  while (!admits_base_scale(k, diam)) --k;
  while (admits_base_scale(k + 1, diam)) ++k;
  return k;
}

EpsilonNet greedy_epsilon_net(const FiniteMetricSpace& space, double scale) {
  if (!(scale > 0.0)) throw Error(Errc::InvalidArgument, "scale must be positive");
  EpsilonNet net;
  net.scale = scale;
  const std::size_t n = space.size();
  for (std::size_t t = 0; t < n; ++t) {
    const bool covered = std::any_of(net.centers.begin(), net.centers.end(),
                                     [&](std::size_t c) { return space(t, c) <= scale; });
    if (!covered) net.centers.push_back(t);
  }
  net.projection.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t best = net.centers.front();
    for (std::size_t c : net.centers) {
      if (space(t, c) < space(t, best)) best = c;
    }
    net.projection[t] = best;
  }
  return net;
}

bool is_epsilon_net(const FiniteMetricSpace& space, const EpsilonNet& net) {
  if (net.projection.size() != space.size()) return false;
  for (std::size_t t = 0; t < space.size(); ++t) {
    const std::size_t c = net.projection[t];
    if (!std::binary_search(net.centers.begin(), net.centers.end(), c)) return false;
    if (space(t, c) > net.scale) return false;
  }
  for (std::size_t c : net.centers) {
    if (net.projection[c] != c) return false;
  }
  return true;
}

namespace {

// Smallest number of balls of radius `scale` centered at points of the space
// covering every point, by subset enumeration in order of increasing size.
std::size_t exact_cover(const FiniteMetricSpace& space, double scale) {
  const std::size_t n = space.size();
  std::vector<std::uint32_t> ball(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t t = 0; t < n; ++t) {
      if (space(c, t) <= scale) ball[c] |= (std::uint32_t{1} << t);
    }
  }
  const std::uint32_t full = n == 32 ? ~std::uint32_t{0} : ((std::uint32_t{1} << n) - 1);
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::size_t size = 1; size <= n; ++size) {
    // Gosper's hack walks all n-bit masks with `size` bits set.
    std::uint64_t mask = (std::uint64_t{1} << size) - 1;
    while (mask < limit) {
      std::uint32_t covered = 0;
      for (std::uint64_t m = mask; m != 0; m &= m - 1) {
        covered |= ball[static_cast<std::size_t>(std::countr_zero(m))];
      }
      if (covered == full) return size;
      const std::uint64_t lowest = mask & (~mask + 1);
      const std::uint64_t ripple = mask + lowest;
      mask = (((ripple ^ mask) >> 2) / lowest) | ripple;
    }
  }
  return n;
}

}  // namespace

std::size_t covering_number(const FiniteMetricSpace& space, double scale, CoverMode mode,
                            std::size_t exact_cap) {
  if (!(scale > 0.0)) throw Error(Errc::InvalidArgument, "scale must be positive");
  if (space.size() == 0) throw Error(Errc::InvalidArgument, "empty space");
  if (mode == CoverMode::Greedy) return greedy_epsilon_net(space, scale).centers.size();
  if (space.size() > exact_cap || space.size() > 32) {
    throw Error(Errc::ExactTooLarge, std::to_string(space.size()) + " points exceed the exact cap " +
                                         std::to_string(exact_cap));
  }
  return exact_cover(space, scale);
}

PartitionHierarchy::PartitionHierarchy(int k_min, std::vector<PartitionLevel> levels)
    : k_min_(k_min), levels_(std::move(levels)) {
  if (levels_.empty()) throw Error(Errc::InvalidArgument, "hierarchy needs at least one level");
}

const PartitionLevel& PartitionHierarchy::level(int k) const {
  if (k < k_min() || k > k_max()) {
    throw Error(Errc::OutOfRange, "level " + std::to_string(k) + " outside [" +
                                      std::to_string(k_min()) + ", " + std::to_string(k_max()) + "]");
  }
  return levels_[static_cast<std::size_t>(k - k_min_)];
}

std::size_t PartitionHierarchy::center(std::size_t t, int k) const {
  const PartitionLevel& lvl = level(k);
  return lvl.center_of_cell[lvl.cell_of[t]];
}

PartitionHierarchy build_dyadic_hierarchy(const FiniteMetricSpace& space, int k_min, int k_max) {
  if (k_max < k_min) throw Error(Errc::InvalidArgument, "k_max < k_min");
  if (space.size() == 0) throw Error(Errc::InvalidArgument, "empty space");
  if (!admits_base_scale(k_min, space.diameter())) {
    throw Error(Errc::ScaleMismatch, "2^{-(k_min-1)} < diameter for k_min = " + std::to_string(k_min));
  }

  const std::size_t n = space.size();
  std::vector<PartitionLevel> levels;
  levels.reserve(static_cast<std::size_t>(k_max - k_min + 1));

  for (int k = k_min; k <= k_max; ++k) {
    const EpsilonNet net = greedy_epsilon_net(space, std::ldexp(1.0, -k));
    PartitionLevel lvl;
    lvl.k = k;
    lvl.cell_of.resize(n);
    // Cell key: (raw projection center, parent cell); first-appearance order
    // by point id keeps numbering deterministic.
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> ids;
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t parent = levels.empty() ? 0 : levels.back().cell_of[t];
      const auto key = std::make_pair(net.projection[t], parent);
      auto [it, inserted] = ids.emplace(key, lvl.center_of_cell.size());
      if (inserted) {
        lvl.center_of_cell.push_back(net.projection[t]);
        if (!levels.empty()) lvl.parent_of_cell.push_back(parent);
      }
      lvl.cell_of[t] = it->second;
    }
    levels.push_back(std::move(lvl));
  }
  return PartitionHierarchy(k_min, std::move(levels));
}

std::vector<std::string> hierarchy_violations(const FiniteMetricSpace& space,
                                              const PartitionHierarchy& hierarchy, double tol) {
  std::vector<std::string> out;
  if (!admits_base_scale(hierarchy.k_min(), space.diameter())) {
    out.push_back("k_min " + std::to_string(hierarchy.k_min()) + " violates the diameter condition");
  }
  for (int k = hierarchy.k_min(); k <= hierarchy.k_max(); ++k) {
    const PartitionLevel& lvl = hierarchy.level(k);
    const double radius = std::ldexp(1.0, -k);
    if (lvl.cell_of.size() != space.size()) {
      out.push_back("level " + std::to_string(k) + " does not label every point");
      continue;
    }
    for (std::size_t t = 0; t < space.size(); ++t) {
      const std::size_t c = lvl.cell_of[t];
      if (c >= lvl.cell_count()) {
        out.push_back("level " + std::to_string(k) + " point " + std::to_string(t) + " has no cell");
        continue;
      }
      if (space(t, lvl.center_of_cell[c]) > radius + tol) {
        out.push_back("level " + std::to_string(k) + " point " + std::to_string(t) +
                      " lies outside the ball of its cell center");
      }
      if (k > hierarchy.k_min()) {
        const PartitionLevel& coarse = hierarchy.level(k - 1);
        if (lvl.parent_of_cell.size() != lvl.cell_count() || lvl.parent_of_cell[c] != coarse.cell_of[t]) {
          out.push_back("level " + std::to_string(k) + " point " + std::to_string(t) +
                        " breaks refinement");
        }
      }
    }
  }
  return out;
}

std::size_t circle_dyadic_partition(int k, double phase) {
  if (k < -1) throw Error(Errc::OutOfRange, "circle partitions start at k = -1");
  if (!(phase >= 0.0 && phase < 2.0 * std::numbers::pi)) {
    throw Error(Errc::PhaseOutOfRange, "phase must lie in [0, 2*pi)");
  }
  // Scaling by a power of two is exact, so cells nest bit-for-bit across k.
  const double turns = phase / (2.0 * std::numbers::pi);
  const double cells = std::ldexp(1.0, k + 2);
  const double idx = std::floor(std::ldexp(turns, k + 2));
  return static_cast<std::size_t>(std::min(idx, cells - 1.0));
}

double circle_cell_center(int k, std::size_t cell) {
  if (k < -1) throw Error(Errc::OutOfRange, "circle partitions start at k = -1");
  const double width = 2.0 * std::numbers::pi / std::ldexp(1.0, k + 2);
  return (static_cast<double>(cell) + 0.5) * width;
}

}  // namespace chainmi
