#pragma once

#include <cstddef>
#include <functional>

#include "ewa_agg/model.hpp"
#include "ewa_agg/rng.hpp"

namespace ewa_agg {

/// Exponentially reweighted prior: weight j is proportional to
/// exp(-|y - theta_j|^2 / beta) * prior(j).
struct PosteriorWeights {
  WeightVector weights;
  double beta;
};

/// Posterior weights via log-sum-exp. beta == kInfiniteBeta returns the prior.
/// Atoms with zero prior mass get weight exactly 0.
PosteriorWeights posterior_weights(const SignalVector& y, const Dictionary& dict, const WeightVector& prior,
                                   double beta);

/// sum_j theta_j w_j.
SignalVector aggregate(const Dictionary& dict, const WeightVector& w);
inline SignalVector aggregate(const Dictionary& dict, const PosteriorWeights& w) { return aggregate(dict, w.weights); }

/// sum_j w_j |theta_j|^2 - |sum_j w_j theta_j|^2, clamped at 0.
double posterior_variance(const Dictionary& dict, const WeightVector& w);

/// KL(p || q) with 0 log(0/q) = 0; +inf when p charges a zero of q.
double kl_divergence(const WeightVector& p, const WeightVector& q);

/// sum_j w_j |y - theta_j|^2 + beta KL(w || prior). The posterior weights
/// minimize this over the simplex.
double gibbs_objective(const WeightVector& w, const SignalVector& y, const Dictionary& dict, const WeightVector& prior,
                       double beta);

struct EwaEstimate {
  SignalVector estimate;
  PosteriorWeights weights;
};

EwaEstimate ewa_estimate(const SignalVector& y, const Dictionary& dict, const WeightVector& prior, double beta);

using PriorSampler = std::function<SignalVector(Rng&)>;

/// Continuous-prior EWA by self-normalized sampling: draws `samples` atoms
/// from the prior and runs the finite estimator on them with uniform weights.
EwaEstimate sampled_prior_ewa(const SignalVector& y, const PriorSampler& prior_sampler, double beta,
                              std::size_t samples, Rng& rng, Dictionary* drawn = nullptr);

struct DvReport {
  bool passed = true;
  double worst_violation = 0.0;  // max over trials of objective(w*) - objective(w), floored at 0
  std::size_t trials = 0;
};

inline constexpr double kDvTolerance = 1e-9;

/// Perturbation test of Gibbs-objective minimality of the posterior weights.
/// Even trials jitter around the posterior toward a random simplex point,
/// odd trials use a Dirichlet(1) point.
DvReport dv_minimality_test(const SignalVector& y, const Dictionary& dict, const WeightVector& prior, double beta,
                            std::size_t trials, Rng& rng);

/// Uniform point on the simplex (Dirichlet with unit concentrations).
WeightVector random_simplex_point(std::size_t m, Rng& rng);

}  // namespace ewa_agg
