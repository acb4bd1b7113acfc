#include "ewa_agg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "ewa_agg/ewa.hpp"
#include "ewa_agg/rng.hpp"

namespace ewa_agg {
namespace {

void check_prior(const Dictionary& dict, const SignalVector& truth, const WeightVector& prior, double beta) {
  if (!(beta > 0.0)) throw InputError("beta must be positive");
  if (prior.size() != dict.size()) throw InputError("prior must have one weight per dictionary atom");
  if (truth.size() != dict.dimension()) throw InputError("truth and atoms differ in dimension");
  if (std::none_of(prior.weights().begin(), prior.weights().end(), [](double w) { return w > 0.0; })) {
    throw InputError("prior has no positive weight");
  }
}

struct MeanAndError {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Ordered reduction over replicate index.
MeanAndError summarize(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

double oracle_bound_finite(const Dictionary& dict, const SignalVector& truth, const WeightVector& prior, double beta) {
  check_prior(dict, truth, prior, beta);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < dict.size(); ++j) {
    if (prior[j] <= 0.0) continue;
    const double loss = squared_distance(dict[j], truth);
    const double complexity = -prior.log_weight(j);
    best = std::min(best, complexity == 0.0 ? loss : loss + beta * complexity);
  }
  return best;
}

double oracle_bound_gibbs(const Dictionary& dict, const SignalVector& truth, const WeightVector& prior, double beta) {
  check_prior(dict, truth, prior, beta);
  if (std::isinf(beta)) {
    double acc = 0.0;
    for (std::size_t j = 0; j < dict.size(); ++j) {
      if (prior[j] > 0.0) acc += prior[j] * squared_distance(dict[j], truth);
    }
    return acc;
  }
  std::vector<double> terms(dict.size());
  for (std::size_t j = 0; j < dict.size(); ++j) {
    terms[j] = prior[j] > 0.0 ? prior.log_weight(j) - squared_distance(dict[j], truth) / beta
                              : -std::numeric_limits<double>::infinity();
  }
  return -beta * log_sum_exp(terms);
}

std::string_view to_string(RiskMode mode) { return mode == RiskMode::clean ? "clean" : "variance_penalty"; }

RiskMode parse_risk_mode(std::string_view name) {
  if (name == "clean") return RiskMode::clean;
  if (name == "variance_penalty") return RiskMode::variance_penalty;
  throw InputError("unknown mode '" + std::string(name) + "'");
}

RiskReport mc_risk(const ExperimentConfig& config, RiskMode mode, std::optional<SupportDiameter> domain_diameter) {
  config.validate();
  const BernsteinProfile profile = profile_for(config.noise);
  const SupportDiameter d0 = domain_diameter.value_or(sup_diameter(config.dictionary));

  RiskReport report;
  report.family = config.noise.family();
  report.n = config.truth.size();
  report.m = config.dictionary.size();
  report.beta = config.beta;
  report.threshold = beta_threshold(profile, d0);
  report.mode = mode;
  report.replicates = config.replicates;
  report.seed = config.seed;
  report.below_threshold = mode == RiskMode::clean && config.beta < report.threshold;
  if (mode == RiskMode::variance_penalty) {
    report.penalty_coefficient = std::isinf(config.beta) ? -1.0 : variance_penalty_coefficient(config.beta, profile, d0);
  }

  const std::size_t r_count = config.replicates;
  std::vector<double> loss(r_count);
  std::vector<double> variance(r_count);
  parallel_for(r_count, [&](std::size_t r) {
    Rng rng = derive_stream(config.seed, r);
    const SignalVector y = config.truth + sample_noise(config.noise, rng);
    if (config.prior_samples) {
      std::discrete_distribution<std::size_t> pick(config.prior.weights().begin(), config.prior.weights().end());
      const PriorSampler sampler = [&](Rng& g) { return config.dictionary[pick(g)]; };
      Dictionary drawn({config.truth});
      const EwaEstimate est = sampled_prior_ewa(y, sampler, config.beta, *config.prior_samples, rng, &drawn);
      loss[r] = squared_distance(est.estimate, config.truth);
      variance[r] = posterior_variance(drawn, est.weights.weights);
    } else {
      const EwaEstimate est = ewa_estimate(y, config.dictionary, config.prior, config.beta);
      loss[r] = squared_distance(est.estimate, config.truth);
      variance[r] = posterior_variance(config.dictionary, est.weights.weights);
    }
  });

  const MeanAndError risk = summarize(loss);
  const MeanAndError var = summarize(variance);
  report.risk_estimate = risk.mean;
  report.risk_stderr = risk.stderr_;
  report.mean_posterior_variance = var.mean;
  report.posterior_variance_stderr = var.stderr_;
  report.oracle_bound = oracle_bound_gibbs(config.dictionary, config.truth, config.prior, config.beta);

  if (mode == RiskMode::clean) {
    report.verdict_stderr = risk.stderr_;
  } else {
    report.penalty_term = report.penalty_coefficient * var.mean;
    std::vector<double> combined(r_count);
    for (std::size_t r = 0; r < r_count; ++r) combined[r] = loss[r] - report.penalty_coefficient * variance[r];
    report.verdict_stderr = summarize(combined).stderr_;
  }
  report.slack = report.oracle_bound + report.penalty_term - report.risk_estimate;
  report.passed = report.risk_estimate <= report.oracle_bound + report.penalty_term +
                                             kConfidenceMultiplier * report.verdict_stderr;
  return report;
}

Certification certify_corollary(const ExperimentConfig& config, std::optional<SupportDiameter> domain_diameter) {
  const BernsteinProfile profile = profile_for(config.noise);
  const SupportDiameter d0 = domain_diameter.value_or(sup_diameter(config.dictionary));
  const double threshold = beta_threshold(profile, d0);

  ExperimentConfig at = config;
  at.beta = threshold;
  ExperimentConfig half = config;
  half.beta = 0.5 * threshold;
  return {mc_risk(at, RiskMode::clean, d0), mc_risk(half, RiskMode::variance_penalty, d0)};
}

ExperimentConfig desk_scenario(Family family, std::size_t n, std::size_t m, std::size_t replicates,
                               std::uint64_t seed) {
  if (n == 0 || m == 0) throw InputError("scenario needs n >= 1 and m >= 1");
  Rng rng = derive_stream(seed, std::numeric_limits<std::uint64_t>::max());
  std::uniform_real_distribution<double> interior(0.1, 0.9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> truth(n);
  for (double& t : truth) t = interior(rng);
  std::vector<SignalVector> atoms;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> atom(n);
    for (double& x : atom) x = unit(rng);
    atoms.emplace_back(std::move(atom));
  }

  std::optional<NoiseModel> noise;
  switch (family) {
    case Family::centered_bernoulli:
      noise.emplace(CenteredBernoulli{truth});
      break;
    case Family::gaussian:
      noise.emplace(NoiseModel::gaussian(n, 1.0));
      break;
    case Family::bounded_binary_mixture:
      noise.emplace(NoiseModel::bounded_binary_mixture(
          n, 0.5, 0.5, {{0.5, 0.5, 0.5}, {0.25, 0.5, 0.3}, {0.5, 0.1, 0.2}}));
      break;
    case Family::centered_binomial:
      noise.emplace(CenteredBinomial{0.2, 5, truth});
      break;
    case Family::laplace:
      noise.emplace(NoiseModel::laplace(n, 1.0));
      break;
  }

  ExperimentConfig config{SignalVector(std::move(truth)), Dictionary(std::move(atoms)), WeightVector::uniform(m),
                          std::move(*noise), 1.0, replicates, seed, std::nullopt};
  config.beta = beta_threshold(profile_for(config.noise), sup_diameter(config.dictionary));
  return config;
}

}  // namespace ewa_agg
