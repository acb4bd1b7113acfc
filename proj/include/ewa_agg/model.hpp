#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ewa_agg/error.hpp"

namespace ewa_agg {

/// Dense n-dimensional signal with finite entries. Used for the true signal,
/// observations, noise draws, dictionary atoms and estimates alike.
class SignalVector {
 public:
  SignalVector() = default;
  explicit SignalVector(std::vector<double> values);
  static SignalVector zeros(std::size_t n);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const SignalVector&, const SignalVector&) = default;

 private:
  std::vector<double> values_;
};

/// Ordered list of m >= 1 candidate signals of a common dimension n.
class Dictionary {
 public:
  explicit Dictionary(std::vector<SignalVector> atoms);

  std::size_t size() const { return atoms_.size(); }
  std::size_t dimension() const { return atoms_.front().size(); }
  const SignalVector& operator[](std::size_t j) const { return atoms_[j]; }
  std::span<const SignalVector> atoms() const { return atoms_; }

 private:
  std::vector<SignalVector> atoms_;
};

/// Probability vector over m atoms, kept in linear and log space.
/// Zero weights carry log-weight -inf.
class WeightVector {
 public:
  static constexpr double kSimplexTolerance = 1e-12;

  /// Validates nonnegativity and sum-to-one within kSimplexTolerance.
  static WeightVector from_weights(std::vector<double> weights);
  /// Normalizes arbitrary log-masses (entries may be -inf) with log-sum-exp.
  static WeightVector from_log_masses(std::span<const double> log_masses);
  static WeightVector uniform(std::size_t m);
  static WeightVector dirac(std::size_t m, std::size_t j);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t j) const { return weights_[j]; }
  double log_weight(std::size_t j) const { return log_weights_[j]; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> log_weights() const { return log_weights_; }

 private:
  WeightVector(std::vector<double> w, std::vector<double> lw)
      : weights_(std::move(w)), log_weights_(std::move(lw)) {}

  std::vector<double> weights_;
  std::vector<double> log_weights_;
};

/// Sup-norm diameter of the support of a prior.
struct SupportDiameter {
  double value = 0.0;
};

/// Stable log(sum(exp(x))). Entries equal to -inf contribute nothing;
/// returns -inf when every entry is -inf.
double log_sum_exp(std::span<const double> x);

/// max over atom pairs of the sup-norm distance; 0 when m == 1.
SupportDiameter sup_diameter(const Dictionary& dictionary);

/// Squared Euclidean distance. Throws InputError on dimension mismatch.
double squared_distance(const SignalVector& a, const SignalVector& b);

SignalVector operator+(const SignalVector& a, const SignalVector& b);

inline constexpr double kInfiniteBeta = std::numeric_limits<double>::infinity();

}  // namespace ewa_agg
