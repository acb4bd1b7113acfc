#include "ewa_agg/ewa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace ewa_agg {
namespace {

void check_beta(double beta) {
  if (!(beta > 0.0)) throw InputError("beta must be positive");
}

void check_lengths(const Dictionary& dict, const WeightVector& w) {
  if (w.size() != dict.size()) throw InputError("weight vector length must equal the number of atoms");
}

// Renormalizes a weight vector whose entries are nonnegative but may have
// drifted off the simplex through arithmetic.
WeightVector renormalize(std::vector<double> w) {
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  std::vector<double> logs(w.size());
  std::transform(w.begin(), w.end(), logs.begin(), [](double x) { return std::log(x); });
  return WeightVector::from_log_masses(logs);
}

}  // namespace

PosteriorWeights posterior_weights(const SignalVector& y, const Dictionary& dict, const WeightVector& prior,
                                   double beta) {
  check_beta(beta);
  check_lengths(dict, prior);
  if (y.size() != dict.dimension()) throw InputError("observation and atoms differ in dimension");
  if (std::isinf(beta)) return {prior, beta};

  std::vector<double> log_mass(dict.size());
  for (std::size_t j = 0; j < dict.size(); ++j) {
    log_mass[j] = prior[j] > 0.0 ? prior.log_weight(j) - squared_distance(y, dict[j]) / beta
                                 : -std::numeric_limits<double>::infinity();
  }
  return {WeightVector::from_log_masses(log_mass), beta};
}

SignalVector aggregate(const Dictionary& dict, const WeightVector& w) {
  check_lengths(dict, w);
  std::vector<double> out(dict.dimension(), 0.0);
  for (std::size_t j = 0; j < dict.size(); ++j) {
    if (w[j] == 0.0) continue;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w[j] * dict[j][i];
  }
  return SignalVector(std::move(out));
}

double posterior_variance(const Dictionary& dict, const WeightVector& w) {
  check_lengths(dict, w);
  const SignalVector mean = aggregate(dict, w);
  double second = 0.0;
  for (std::size_t j = 0; j < dict.size(); ++j) {
    if (w[j] == 0.0) continue;
    double norm2 = 0.0;
    for (double v : dict[j].values()) norm2 += v * v;
    second += w[j] * norm2;
  }
  double mean2 = 0.0;
  for (double v : mean.values()) mean2 += v * v;
  return std::max(0.0, second - mean2);
}

double kl_divergence(const WeightVector& p, const WeightVector& q) {
  if (p.size() != q.size()) throw InputError("kl_divergence requires equal lengths");
  double acc = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] == 0.0) continue;
    if (q[j] == 0.0) return std::numeric_limits<double>::infinity();
    acc += p[j] * (p.log_weight(j) - q.log_weight(j));
  }
  return std::max(0.0, acc);
}

double gibbs_objective(const WeightVector& w, const SignalVector& y, const Dictionary& dict, const WeightVector& prior,
                       double beta) {
  check_beta(beta);
  check_lengths(dict, w);
  check_lengths(dict, prior);
  double loss = 0.0;
  for (std::size_t j = 0; j < dict.size(); ++j) {
    if (w[j] > 0.0) loss += w[j] * squared_distance(y, dict[j]);
  }
  const double kl = kl_divergence(w, prior);
  if (kl == 0.0) return loss;
  return loss + beta * kl;
}

EwaEstimate ewa_estimate(const SignalVector& y, const Dictionary& dict, const WeightVector& prior, double beta) {
  PosteriorWeights w = posterior_weights(y, dict, prior, beta);
  SignalVector estimate = aggregate(dict, w);
  return {std::move(estimate), std::move(w)};
}

EwaEstimate sampled_prior_ewa(const SignalVector& y, const PriorSampler& prior_sampler, double beta,
                              std::size_t samples, Rng& rng, Dictionary* drawn) {
  if (samples == 0) throw InputError("prior sample count must be positive");
  std::vector<SignalVector> atoms;
  atoms.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) atoms.push_back(prior_sampler(rng));
  Dictionary dict(std::move(atoms));
  EwaEstimate out = ewa_estimate(y, dict, WeightVector::uniform(samples), beta);
  if (drawn != nullptr) *drawn = std::move(dict);
  return out;
}

WeightVector random_simplex_point(std::size_t m, Rng& rng) {
  std::exponential_distribution<double> unit_exp(1.0);
  std::vector<double> g(m);
  for (double& x : g) {
    do {
      x = unit_exp(rng);
    } while (x <= 0.0);
  }
  return renormalize(std::move(g));
}

DvReport dv_minimality_test(const SignalVector& y, const Dictionary& dict, const WeightVector& prior, double beta,
                            std::size_t trials, Rng& rng) {
  if (trials == 0) throw InputError("trials must be positive");
  const PosteriorWeights best = posterior_weights(y, dict, prior, beta);
  const double best_value = gibbs_objective(best.weights, y, dict, prior, beta);
  const std::size_t m = dict.size();

  std::uniform_real_distribution<double> log_step(std::log(1e-6), 0.0);
  DvReport report;
  report.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    WeightVector target = random_simplex_point(m, rng);
    WeightVector candidate = target;
    if (t % 2 == 0) {
      const double lambda = std::exp(log_step(rng));
      std::vector<double> mixed(m);
      for (std::size_t j = 0; j < m; ++j) mixed[j] = (1.0 - lambda) * best.weights[j] + lambda * target[j];
      candidate = renormalize(std::move(mixed));
    }
    const double value = gibbs_objective(candidate, y, dict, prior, beta);
    const double violation = best_value - value;
    report.worst_violation = std::max(report.worst_violation, violation);
    if (violation > kDvTolerance) report.passed = false;
  }
  return report;
}

}  // namespace ewa_agg
