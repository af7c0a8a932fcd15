#include "chainmi/info_theory.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "chainmi/error.hpp"

namespace chainmi {

namespace {

void require_distribution(std::span<const double> p, double tol, const char* name) {
  if (p.empty()) throw Error(Errc::NotNormalized, std::string(name) + " is empty");
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(Errc::NotNormalized, std::string(name) + " has a negative or non-finite entry");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > tol) {
    throw Error(Errc::NotNormalized, std::string(name) + " sums to " + std::to_string(total));
  }
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace

JointDistribution::JointDistribution(Matrix table, double tol) : table_(std::move(table)) {
  if (table_.empty() || table_.front().empty()) throw Error(Errc::NotNormalized, "empty joint table");
  double total = 0.0;
  for (const auto& row : table_) {
    if (row.size() != table_.front().size()) throw Error(Errc::NotNormalized, "ragged joint table");
    for (double v : row) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw Error(Errc::NotNormalized, "joint table has a negative or non-finite entry");
      }
      total += v;
    }
  }
  if (std::abs(total - 1.0) > tol) {
    throw Error(Errc::NotNormalized, "joint table sums to " + std::to_string(total));
  }
}

JointDistribution JointDistribution::from_weights(const Matrix& weights) {
  double total = 0.0;
  for (const auto& row : weights) {
    for (double v : row) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw Error(Errc::NotNormalized, "negative weight");
      total += v;
    }
  }
  if (!(total > 0.0)) throw Error(Errc::NotNormalized, "weights sum to zero");
  Matrix table = weights;
  for (auto& row : table) {
    for (double& v : row) v /= total;
  }
  return JointDistribution(std::move(table), 1e-9);
}

std::vector<double> JointDistribution::marginal_w() const {
  std::vector<double> out(rows(), 0.0);
  for (std::size_t w = 0; w < rows(); ++w) {
    out[w] = std::accumulate(table_[w].begin(), table_[w].end(), 0.0);
  }
  return out;
}

std::vector<double> JointDistribution::marginal_x() const {
  std::vector<double> out(cols(), 0.0);
  for (const auto& row : table_) {
    for (std::size_t x = 0; x < row.size(); ++x) out[x] += row[x];
  }
  return out;
}

std::vector<double> JointDistribution::flattened() const {
  std::vector<double> out;
  out.reserve(rows() * cols());
  for (const auto& row : table_) out.insert(out.end(), row.begin(), row.end());
  return out;
}

double entropy(std::span<const double> dist, double tol) {
  require_distribution(dist, tol, "distribution");
  double h = 0.0;
  for (double p : dist) h -= xlogx(p);
  return std::max(h, 0.0);
}

double binary_entropy(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(Errc::OutOfRange, "alpha must lie in [0, 1]");
  return std::max(-xlogx(alpha) - xlogx(1.0 - alpha), 0.0);
}

double kl_divergence(std::span<const double> p, std::span<const double> q, double tol) {
  if (p.size() != q.size()) throw Error(Errc::SupportMismatch, "p and q have different sizes");
  require_distribution(p, tol, "p");
  require_distribution(q, tol, "q");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(d, 0.0);
}

double mutual_information(const JointDistribution& joint) {
  const std::vector<double> pw = joint.marginal_w();
  const std::vector<double> px = joint.marginal_x();
  double mi = 0.0;
  for (std::size_t w = 0; w < joint.rows(); ++w) {
    for (std::size_t x = 0; x < joint.cols(); ++x) {
      const double pj = joint(w, x);
      if (pj > 0.0) mi += pj * std::log(pj / (pw[w] * px[x]));
    }
  }
  return std::max(mi, 0.0);
}

double plug_in_mi(std::span<const std::pair<std::int64_t, std::int64_t>> samples) {
  if (samples.empty()) throw Error(Errc::EmptySample, "plug-in MI needs at least one sample");
  std::map<std::int64_t, std::size_t> w_ids;
  std::map<std::int64_t, std::size_t> x_ids;
  for (const auto& [w, x] : samples) {
    w_ids.emplace(w, w_ids.size());
    x_ids.emplace(x, x_ids.size());
  }
  Matrix counts(w_ids.size(), std::vector<double>(x_ids.size(), 0.0));
  for (const auto& [w, x] : samples) counts[w_ids[w]][x_ids[x]] += 1.0;
  return mutual_information(JointDistribution::from_weights(counts));
}

double plug_in_mi_bias(std::size_t w_labels, std::size_t x_labels, std::size_t samples) noexcept {
  if (samples == 0 || w_labels == 0 || x_labels == 0) return 0.0;
  return static_cast<double>((w_labels - 1) * (x_labels - 1)) / (2.0 * static_cast<double>(samples));
}

double dv_objective(std::span<const double> p, std::span<const double> q, std::span<const double> f) {
  if (p.size() != q.size() || p.size() != f.size()) {
    throw Error(Errc::SupportMismatch, "p, q and f must have the same size");
  }
  double ep = 0.0;
  double eq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) ep += p[i] * f[i];
    if (q[i] > 0.0 && f[i] > -std::numeric_limits<double>::infinity()) eq += q[i] * std::exp(f[i]);
  }
  return ep - std::log(eq);
}

double dv_gap(std::span<const double> p, std::span<const double> q, double tol) {
  const double d = kl_divergence(p, q, tol);
  if (std::isinf(d)) throw Error(Errc::SupportMismatch, "p is not absolutely continuous w.r.t. q");
  std::vector<double> f(p.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) f[i] = std::log(p[i] / q[i]);
  }
  return d - dv_objective(p, q, f);
}

}  // namespace chainmi
