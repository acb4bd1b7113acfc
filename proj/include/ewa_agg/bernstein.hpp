#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "ewa_agg/model.hpp"
#include "ewa_agg/noise.hpp"
#include "ewa_agg/rng.hpp"

namespace ewa_agg {

/// Bernstein profile of a family's coupling: conditionally on F, zeta
/// satisfies E[exp(t zeta)] <= exp(v(alpha) t^2 / (c (1 - b(alpha) |t|)))
/// for |t| < 1 / b(alpha).
///
/// Every family has v(alpha) = v_scale * alpha * (v_shift + alpha) and
/// b(alpha) = b_scale * (1 + alpha). v is never squared.
struct BernsteinProfile {
  Family family = Family::gaussian;
  double v_scale = 0.0;
  double v_shift = 0.0;
  double b_scale = 0.0;
  double v_prime_0 = 0.0;  // closed form
  double b_0 = 0.0;        // closed form
  double mgf_normalization = 2.0;

  double v(double alpha) const { return v_scale * alpha * (v_shift + alpha); }
  double b(double alpha) const { return b_scale * (1.0 + alpha); }
};

/// Profile with the max over coordinates where the family takes one.
BernsteinProfile profile_for(const NoiseModel& model);

/// Either an exact finite law or a sample from a continuous law.
using MgfLaw = std::variant<DiscreteLaw, std::span<const double>>;

struct MgfReport {
  /// max over t of E[exp(t zeta)] / bound (sample mean for continuous laws).
  double max_ratio = 0.0;
  bool passed = true;
  std::size_t points = 0;
};

inline constexpr double kMgfStandardErrors = 5.0;

/// Checks E[exp(t zeta)] <= exp(v t^2 / (c (1 - b |t|))) on each t of the
/// grid. Exact for a DiscreteLaw; for a sample, passes when the sample mean
/// is within 5 standard errors above the bound. Throws InputError when some
/// |t| >= 1 / b.
MgfReport mgf_bound_check(const MgfLaw& law, double v, double b, double c, std::span<const double> t_grid);

/// `points` equally spaced values covering `coverage` of (-1/b, 1/b); when
/// b == 0 the range is |t| <= 2 / sqrt(v) (|t| <= 1 if v == 0).
std::vector<double> admissible_t_grid(double v, double b, std::size_t points, double coverage = 0.95);

/// Conditional laws of zeta given every distinct conditioning record of a
/// discrete family at this alpha. Empty for continuous families.
std::vector<DiscreteLaw> conditional_zeta_laws(const NoiseModel& model, double alpha);

/// MGF domination of the family's coupling against profile_for(model) at
/// alpha. Discrete families use exact conditional laws; Gaussian and Laplace
/// use sample_size draws of zeta for every distinct coordinate parameter.
MgfReport verify_bernstein(const NoiseModel& model, double alpha, std::size_t t_points, std::size_t sample_size,
                           Rng& rng);

/// 2 v'(0) + 2 b(0) d0.
double beta_threshold(const BernsteinProfile& profile, SupportDiameter d0);

/// 2 v'(0) / (beta - 2 b(0) d0) - 1; throws InputError when
/// beta <= 2 b(0) d0.
double variance_penalty_coefficient(double beta, const BernsteinProfile& profile, SupportDiameter d0);

}  // namespace ewa_agg
