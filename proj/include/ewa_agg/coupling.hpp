#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ewa_agg/model.hpp"
#include "ewa_agg/noise.hpp"
#include "ewa_agg/rng.hpp"

namespace ewa_agg {

// A coupling for scale alpha in (0, 1] is a random vector zeta with
// E[zeta | F] = 0 and xi + zeta equal in law to (1 + alpha) xi. alpha == 0 is
// accepted as a degenerate sentinel that returns zeta = 0.

/// zeta given a centered Bernoulli value xi in {1 - rho, -rho}.
double couple_bernoulli(double xi_value, double rho, double alpha, Rng& rng);

/// zeta given eta in {a, -b} drawn from the two-point law B(a, b).
double couple_binary(double a, double b, double eta_value, double alpha, Rng& rng);

/// Independent N(0, (2 alpha + alpha^2) sigma^2) draw.
double couple_gaussian(double sigma, double alpha, Rng& rng);

/// zeta = a * sum_j zbar_j with zbar_j = couple_bernoulli(eta_j).
double couple_binomial(std::span<const double> eta_values, double rho, double a, double alpha, Rng& rng);

/// 0 with probability (1 + alpha)^-2, otherwise a Laplace((1 + alpha) mu) draw.
double couple_laplace(double mu, double alpha, Rng& rng);

/// Exact conditional law of zeta given xi for the Bernoulli coupling.
DiscreteLaw bernoulli_coupling_law(double xi_value, double rho, double alpha);

/// Exact conditional law of zeta given eta for the two-point B(a, b) coupling.
DiscreteLaw binary_coupling_law(double a, double b, double eta_value, double alpha);

/// Per-coordinate latent values generating the conditioning sigma-algebra:
/// {xi} for Bernoulli, Gaussian and Laplace; {a, b, eta} for the bounded
/// mixture; {eta_1, ..., eta_k} for the binomial.
using ConditioningRecord = std::vector<std::vector<double>>;

struct CouplingDraw {
  SignalVector xi;
  SignalVector zeta;
  double alpha = 0.0;
  ConditioningRecord conditioning_record;
};

/// Joint draw of (xi, zeta) for a full noise vector.
CouplingDraw draw_coupled(const NoiseModel& model, double alpha, Rng& rng);

struct CoordinateDraw {
  double xi = 0.0;
  double zeta = 0.0;
  std::vector<double> record;
};

CoordinateDraw draw_coupled_coordinate(const NoiseModel& model, std::size_t i, double alpha, Rng& rng);

enum class CouplingMethod { exact, ks, cf_grid };

std::string_view to_string(CouplingMethod method);
CouplingMethod parse_coupling_method(std::string_view name);

struct CouplingReport {
  Family family = Family::centered_bernoulli;
  double alpha = 0.0;
  CouplingMethod method = CouplingMethod::exact;
  /// max atom error (exact), KS distance (ks) or max CF modulus error (cf_grid).
  double statistic = 0.0;
  double threshold = 0.0;
  /// Max |E[zeta | F]| (exact) or |empirical mean of zeta| (sampled methods).
  double mean_zero = 0.0;
  double mean_zero_threshold = 0.0;
  bool passed = false;
  /// 0 for exact enumeration.
  std::size_t sample_size = 0;
};

inline constexpr double kExactTolerance = 1e-12;
inline constexpr double kKsSignificance = 0.001;
inline constexpr std::size_t kCfGridPoints = 64;

/// Two-sample Kolmogorov-Smirnov distance. Both inputs are sorted in place.
double ks_two_sample_statistic(std::vector<double>& lhs, std::vector<double>& rhs);

/// Asymptotic critical distance of the two-sample KS test at `significance`.
double ks_critical_value(std::size_t n_lhs, std::size_t n_rhs, double significance);

/// Checks the coupling identity and the conditional mean-zero property.
/// exact enumerates every branch (discrete families only). ks compares
/// sample_size draws of xi + zeta against independent draws of (1 + alpha) xi.
/// cf_grid compares empirical characteristic functions on 64 points in
/// [-5/s, 5/s], s the coordinate's scale. Sampled methods check each distinct
/// coordinate parameter and report the worst one.
CouplingReport verify_coupling(const NoiseModel& model, double alpha, CouplingMethod method, std::size_t sample_size,
                               Rng& rng);

}  // namespace ewa_agg
