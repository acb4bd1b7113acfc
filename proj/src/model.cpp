#include "ewa_agg/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ewa_agg {

SignalVector::SignalVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InputError("signal must have dimension n >= 1");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InputError("signal entry " + std::to_string(i) + " is not finite");
    }
  }
}

SignalVector SignalVector::zeros(std::size_t n) { return SignalVector(std::vector<double>(n, 0.0)); }

Dictionary::Dictionary(std::vector<SignalVector> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw InputError("dictionary must contain at least one atom");
  const std::size_t n = atoms_.front().size();
  for (const auto& atom : atoms_) {
    if (atom.size() != n) throw InputError("dictionary atoms must share one dimension");
  }
}

double log_sum_exp(std::span<const double> x) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : x) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double v : x) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

WeightVector WeightVector::from_weights(std::vector<double> weights) {
  if (weights.empty()) throw InputError("weight vector must be nonempty");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("weights must be finite and nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    throw InputError("weights must sum to one");
  }
  std::vector<double> logs(weights.size());
  std::transform(weights.begin(), weights.end(), logs.begin(), [](double w) { return std::log(w); });
  return WeightVector(std::move(weights), std::move(logs));
}

WeightVector WeightVector::from_log_masses(std::span<const double> log_masses) {
  if (log_masses.empty()) throw InputError("weight vector must be nonempty");
  const double norm = log_sum_exp(log_masses);
  if (!std::isfinite(norm)) throw InputError("all log-masses are -inf");
  std::vector<double> w(log_masses.size());
  std::vector<double> lw(log_masses.size());
  for (std::size_t j = 0; j < log_masses.size(); ++j) {
    lw[j] = log_masses[j] - norm;
    w[j] = std::exp(lw[j]);
  }
  return WeightVector(std::move(w), std::move(lw));
}

WeightVector WeightVector::uniform(std::size_t m) {
  if (m == 0) throw InputError("weight vector must be nonempty");
  const double w = 1.0 / static_cast<double>(m);
  return WeightVector(std::vector<double>(m, w), std::vector<double>(m, -std::log(static_cast<double>(m))));
}

WeightVector WeightVector::dirac(std::size_t m, std::size_t j) {
  if (j >= m) throw InputError("dirac index out of range");
  std::vector<double> w(m, 0.0);
  std::vector<double> lw(m, -std::numeric_limits<double>::infinity());
  w[j] = 1.0;
  lw[j] = 0.0;
  return WeightVector(std::move(w), std::move(lw));
}

SupportDiameter sup_diameter(const Dictionary& dictionary) {
  double d0 = 0.0;
  const auto atoms = dictionary.atoms();
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    for (std::size_t l = j + 1; l < atoms.size(); ++l) {
      for (std::size_t i = 0; i < atoms[j].size(); ++i) {
        d0 = std::max(d0, std::abs(atoms[j][i] - atoms[l][i]));
      }
    }
  }
  return {d0};
}

double squared_distance(const SignalVector& a, const SignalVector& b) {
  if (a.size() != b.size()) throw InputError("dimension mismatch in squared_distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

SignalVector operator+(const SignalVector& a, const SignalVector& b) {
  if (a.size() != b.size()) throw InputError("dimension mismatch in vector sum");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return SignalVector(std::move(out));
}

}  // namespace ewa_agg
