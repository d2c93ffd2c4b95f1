#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"

namespace wgt {

/// Positive node weights normalized so that they sum to the node count.
///
/// The only way to obtain one is make_weights(), so every instance satisfies
/// the positivity and normalization invariants.
class WeightVector {
 public:
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  double max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }
  double min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }

  /// c_lambda = n^-2 sum lambda_i^2; lies in [1/n, 1).
  double c_lambda() const noexcept {
    const double n = static_cast<double>(size());
    double sq = 0.0;
    for (double v : values_) sq += v * v;
    return sq / (n * n);
  }

  /// Metric distortion sqrt(lambda_max / lambda_min).
  double kappa() const noexcept { return std::sqrt(max() / min()); }

  bool is_uniform() const noexcept {
    return std::all_of(values_.begin(), values_.end(),
                       [&](double v) { return v == values_.front(); });
  }

 private:
  explicit WeightVector(std::vector<double> v) : values_(std::move(v)) {}
  friend WeightVector make_weights(std::span<const double> raw);

  std::vector<double> values_;
};

inline WeightVector make_weights(std::span<const double> raw) {
  if (raw.size() < 2) fail(ErrorCode::TooFewNodes, "weight vector needs at least 2 entries");
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!(raw[i] > 0.0) || !std::isfinite(raw[i])) {
      fail(ErrorCode::NonPositiveWeight, "weight " + std::to_string(i + 1) + " is not positive");
    }
  }
  const double n = static_cast<double>(raw.size());
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  std::vector<double> v(raw.begin(), raw.end());
  // Already-normalized input is kept bit-for-bit (idempotence).
  if (std::abs(total - n) > 1e-12 * n) {
    const double scale = n / total;
    for (auto& x : v) x *= scale;
  }
  return WeightVector(std::move(v));
}

inline WeightVector make_weights(std::initializer_list<double> raw) {
  return make_weights(std::span<const double>(raw.begin(), raw.size()));
}

inline WeightVector uniform_weights(std::size_t n) {
  return make_weights(std::vector<double>(n, 1.0));
}

namespace presets {

inline const std::vector<double>& lambda_a_raw() {
  static const std::vector<double> v = {0.3, 0.8, 1.0, 0.9, 0.7, 1.0, 2.0, 2.2,
                                        1.2, 1.4, 0.8, 0.5, 1.5, 0.6, 0.6, 0.5};
  return v;
}

// Sums to 17 as published; make_weights rescales it to 16.
inline const std::vector<double>& lambda_b_raw() {
  static const std::vector<double> v = {0.4, 2.3, 1.2, 0.5, 1.0, 0.6, 1.5, 0.8,
                                        1.1, 0.7, 1.8, 0.9, 1.4, 0.6, 1.2, 1.0};
  return v;
}

inline WeightVector lambda_a() { return make_weights(lambda_a_raw()); }
inline WeightVector lambda_b() { return make_weights(lambda_b_raw()); }

}  // namespace presets

// One real per line; blank lines and '#' comments are skipped.
inline WeightVector read_weights(std::istream& in) {
  std::vector<double> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double x;
    if (!(ls >> x)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      fail(ErrorCode::Parse, "weights line " + std::to_string(lineno) + ": expected a real");
    }
    raw.push_back(x);
  }
  return make_weights(raw);
}

inline void write_weights(std::ostream& out, const WeightVector& w) {
  out << std::setprecision(17);
  for (double v : w.values()) out << v << '\n';
}

}  // namespace wgt
