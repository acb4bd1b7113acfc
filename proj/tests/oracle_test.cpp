#include <doctest.h>

#include <cmath>

#include "ewa_agg/ewa.hpp"
#include "ewa_agg/oracle.hpp"

using namespace ewa_agg;

namespace {

Dictionary dict_of(std::initializer_list<std::vector<double>> atoms) {
  std::vector<SignalVector> out;
  for (const auto& a : atoms) out.emplace_back(a);
  return Dictionary(std::move(out));
}

ExperimentConfig small_config(NoiseModel noise, double beta, std::size_t replicates, std::uint64_t seed) {
  const std::size_t n = noise.dimension();
  std::vector<SignalVector> atoms;
  for (std::size_t j = 0; j < 4; ++j) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 0.25 * static_cast<double>((i + j) % 5);
    atoms.emplace_back(std::move(x));
  }
  return ExperimentConfig{SignalVector(std::vector<double>(n, 0.4)), Dictionary(std::move(atoms)),
                          WeightVector::uniform(4), std::move(noise), beta, replicates, seed, std::nullopt};
}

}  // namespace

TEST_CASE("oracle_bound_finite examples") {
  const SignalVector truth({0.0, 1.0});
  const auto dict = dict_of({{0.0, 1.0}, {2.0, 2.0}});
  CHECK(oracle_bound_finite(dict, truth, WeightVector::uniform(2), 4.0) ==
        doctest::Approx(2.772588722239781).epsilon(1e-12));
  CHECK(oracle_bound_finite(dict_of({{2.0, 2.0}}), truth, WeightVector::uniform(1), 4.0) == 5.0);
  CHECK(oracle_bound_finite(dict, truth, WeightVector::dirac(2, 1), 4.0) == 5.0);
  CHECK_THROWS_AS(oracle_bound_finite(dict, truth, WeightVector::uniform(3), 4.0), InputError);
}

TEST_CASE("oracle_bound_gibbs examples") {
  const SignalVector truth({0.0});
  CHECK(oracle_bound_gibbs(dict_of({{1.5}}), truth, WeightVector::uniform(1), 2.0) == doctest::Approx(2.25));
  CHECK(oracle_bound_gibbs(dict_of({{1.5}, {-1.5}}), truth, WeightVector::uniform(2), 2.0) == doctest::Approx(2.25));
  CHECK(oracle_bound_gibbs(dict_of({{0.0}, {1.0}}), truth, WeightVector::uniform(2), 1.0) ==
        doctest::Approx(0.3798854930417225).epsilon(1e-12));
}

TEST_CASE("oracle_bound_gibbs agrees with a simplex grid search") {
  // Brute force over pi = (p, 1 - p) on a 10^6-point grid.
  const auto dict = dict_of({{0.0}, {1.0}});
  const SignalVector truth({0.0});
  const auto prior = WeightVector::uniform(2);
  double best = INFINITY;
  const int steps = 1'000'000;
  for (int s = 0; s <= steps; ++s) {
    const double p = static_cast<double>(s) / steps;
    const double kl = (p > 0 ? p * std::log(2 * p) : 0.0) + (p < 1 ? (1 - p) * std::log(2 * (1 - p)) : 0.0);
    best = std::min(best, (1 - p) * 1.0 + kl);
  }
  CHECK(oracle_bound_gibbs(dict, truth, prior, 1.0) <= best);
  CHECK(best - oracle_bound_gibbs(dict, truth, prior, 1.0) <= 1e-9);
}

TEST_CASE("gibbs bound is below the finite bound and approaches it as beta -> 0") {
  Rng rng = derive_stream(31, 0);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<SignalVector> atoms;
    for (int j = 0; j < 6; ++j) atoms.push_back(SignalVector({g(rng), g(rng), g(rng)}));
    const Dictionary dict(std::move(atoms));
    const SignalVector truth({g(rng), g(rng), g(rng)});
    const auto prior = random_simplex_point(6, rng);
    const double beta = 0.1 + 0.05 * trial;
    CHECK(oracle_bound_gibbs(dict, truth, prior, beta) <= oracle_bound_finite(dict, truth, prior, beta) + 1e-12);
  }
  const auto dict = dict_of({{0.0}, {1.0}, {0.3}});
  const SignalVector truth({0.9});
  const double beta = 1e-6;
  CHECK(oracle_bound_gibbs(dict, truth, WeightVector::uniform(3), beta) ==
        doctest::Approx(0.01).epsilon(1e-3));
}

TEST_CASE("mc_risk with beta = inf is the deterministic prior mean") {
  auto config = small_config(NoiseModel::gaussian(3, 1.0), kInfiniteBeta, 50, 5);
  const auto report = mc_risk(config, RiskMode::clean);
  const SignalVector mean = aggregate(config.dictionary, config.prior);
  CHECK(report.risk_estimate == doctest::Approx(squared_distance(mean, config.truth)).epsilon(1e-12));
  CHECK(report.risk_stderr <= 1e-12);
  CHECK(report.passed);
}

TEST_CASE("mc_risk passes for Gaussian noise at the threshold") {
  Rng rng = derive_stream(77, 0);
  std::normal_distribution<double> g;
  std::vector<SignalVector> atoms;
  for (int j = 0; j < 10; ++j) {
    std::vector<double> x(50);
    for (double& v : x) v = g(rng);
    atoms.emplace_back(std::move(x));
  }
  std::vector<double> truth(50);
  for (double& v : truth) v = g(rng);
  ExperimentConfig config{SignalVector(truth), Dictionary(atoms), WeightVector::uniform(10),
                          NoiseModel::gaussian(50, 1.0), 4.0, 10'000, 99, std::nullopt};
  const auto report = mc_risk(config, RiskMode::clean);
  CHECK(report.threshold == 4.0);
  CHECK(report.passed);
  CHECK(report.risk_estimate <= report.oracle_bound + 3.0 * report.risk_stderr);

  // Truth equal to an atom: oracle term vanishes and the bound is at most beta log m.
  ExperimentConfig at_atom = config;
  at_atom.truth = config.dictionary[3];
  at_atom.replicates = 2000;
  const auto r2 = mc_risk(at_atom, RiskMode::clean);
  CHECK(r2.risk_estimate <= 4.0 * std::log(10.0) + 3.0 * r2.risk_stderr);
}

TEST_CASE("mc_risk flags and modes") {
  auto config = small_config(NoiseModel::centered_bernoulli(5, 0.4), 1.0, 200, 1);
  const auto clean = mc_risk(config, RiskMode::clean);
  CHECK(clean.below_threshold);
  CHECK(clean.penalty_term == 0.0);
  const auto penalized = mc_risk(config, RiskMode::variance_penalty);
  CHECK(penalized.penalty_coefficient > 0.0);
  CHECK(penalized.penalty_term == doctest::Approx(penalized.penalty_coefficient * penalized.mean_posterior_variance));
  CHECK(penalized.slack ==
        doctest::Approx(penalized.oracle_bound + penalized.penalty_term - penalized.risk_estimate));

  config.beta = 0.1;  // below 2 b(0) d0
  CHECK_THROWS_AS(mc_risk(config, RiskMode::variance_penalty), InputError);
  config.beta = -1.0;
  CHECK_THROWS_AS(mc_risk(config, RiskMode::clean), InputError);
}

TEST_CASE("mc_risk is reproducible and independent of worker count") {
  auto config = small_config(NoiseModel::laplace(6, 0.5), 3.0, 500, 1234);
  setenv("EWA_AGG_THREADS", "1", 1);
  const auto one = mc_risk(config, RiskMode::clean);
  setenv("EWA_AGG_THREADS", "4", 1);
  const auto four = mc_risk(config, RiskMode::clean);
  unsetenv("EWA_AGG_THREADS");
  CHECK(one.risk_estimate == four.risk_estimate);
  CHECK(one.risk_stderr == four.risk_stderr);
  CHECK(one.mean_posterior_variance == four.mean_posterior_variance);
}

TEST_CASE("mc_risk with sampled prior draws") {
  auto config = small_config(NoiseModel::gaussian(3, 0.5), 2.0, 300, 8);
  config.prior_samples = 64;
  const auto sampled = mc_risk(config, RiskMode::clean);
  config.prior_samples.reset();
  const auto exact = mc_risk(config, RiskMode::clean);
  CHECK(sampled.risk_estimate == doctest::Approx(exact.risk_estimate).epsilon(0.1));
}

TEST_CASE("certify_corollary runs both modes") {
  const auto config = desk_scenario(Family::centered_bernoulli, 20, 5, 1000, 3);
  const auto cert = certify_corollary(config, SupportDiameter{1.0});
  CHECK(cert.at_threshold.beta == doctest::Approx(8.0 / 3.0));
  CHECK(cert.at_threshold.mode == RiskMode::clean);
  CHECK(cert.below_threshold.beta == doctest::Approx(4.0 / 3.0));
  CHECK(cert.below_threshold.mode == RiskMode::variance_penalty);
  CHECK(cert.at_threshold.passed);
  CHECK(cert.below_threshold.passed);

  const auto binom = desk_scenario(Family::centered_binomial, 20, 5, 1000, 4);
  const auto c2 = certify_corollary(binom, SupportDiameter{1.0});
  CHECK(c2.at_threshold.beta == doctest::Approx(8.0 / 15.0));
  CHECK(c2.at_threshold.passed);

  const auto lap = desk_scenario(Family::laplace, 20, 5, 1000, 5);
  const auto c3 = certify_corollary(lap, SupportDiameter{1.0});
  CHECK(c3.at_threshold.beta == doctest::Approx(6.0));
  CHECK(c3.at_threshold.passed);
}
