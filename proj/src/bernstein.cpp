#include "ewa_agg/bernstein.hpp"

#include <algorithm>
#include <cmath>

#include "ewa_agg/coupling.hpp"

namespace ewa_agg {
namespace {

double max_of(const std::vector<double>& xs) { return *std::max_element(xs.begin(), xs.end()); }

double bound_at(double t, double v, double b, double c) {
  return std::exp(v * t * t / (c * (1.0 - b * std::abs(t))));
}

}  // namespace

BernsteinProfile profile_for(const NoiseModel& model) {
  BernsteinProfile p;
  p.family = model.family();
  std::visit(
      [&](const auto& params) {
        using T = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<T, CenteredBernoulli>) {
          // v = alpha (1 + alpha), b = (1 + alpha) / 3
          p.v_scale = 1.0;
          p.v_shift = 1.0;
          p.b_scale = 1.0 / 3.0;
          p.v_prime_0 = 1.0;
          p.b_0 = 1.0 / 3.0;
          p.mgf_normalization = 2.0;
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          // v = (2 alpha + alpha^2) sigma^2, b = 0
          const double s2 = std::pow(max_of(params.sigma), 2);
          p.v_scale = s2;
          p.v_shift = 2.0;
          p.b_scale = 0.0;
          p.v_prime_0 = 2.0 * s2;
          p.b_0 = 0.0;
          p.mgf_normalization = 2.0;
        } else if constexpr (std::is_same_v<T, BoundedBinaryMixture>) {
          // v = (A + B)^2 alpha (1 + alpha), b = (A + B)(1 + alpha) / 3
          const double l = params.a_max + params.b_max;
          p.v_scale = l * l;
          p.v_shift = 1.0;
          p.b_scale = l / 3.0;
          p.v_prime_0 = l * l;
          p.b_0 = l / 3.0;
          p.mgf_normalization = 2.0;
        } else if constexpr (std::is_same_v<T, CenteredBinomial>) {
          // v = a^2 k alpha (1 + alpha), b = a (1 + alpha) / 3
          p.v_scale = params.a * params.a * params.k;
          p.v_shift = 1.0;
          p.b_scale = params.a / 3.0;
          p.v_prime_0 = params.a * params.a * params.k;
          p.b_0 = params.a / 3.0;
          p.mgf_normalization = 2.0;
        } else {
          // v = alpha (2 + alpha) mu^2, b = (1 + alpha) mu, unhalved exponent
          const double mu = max_of(params.mu);
          p.v_scale = mu * mu;
          p.v_shift = 2.0;
          p.b_scale = mu;
          p.v_prime_0 = 2.0 * mu * mu;
          p.b_0 = mu;
          p.mgf_normalization = 1.0;
        }
      },
      model.params());
  return p;
}

MgfReport mgf_bound_check(const MgfLaw& law, double v, double b, double c, std::span<const double> t_grid) {
  if (!(v >= 0.0) || !(b >= 0.0) || !(c > 0.0)) throw InputError("Bernstein parameters must satisfy v, b >= 0, c > 0");
  for (double t : t_grid) {
    if (!std::isfinite(t) || b * std::abs(t) >= 1.0) throw InputError("t grid leaves the admissible domain |t| < 1/b");
  }
  MgfReport report;
  report.points = t_grid.size();
  for (double t : t_grid) {
    const double bound = bound_at(t, v, b, c);
    double mgf = 0.0;
    double margin = 0.0;
    if (const auto* exact = std::get_if<DiscreteLaw>(&law)) {
      for (const auto& atom : exact->atoms()) mgf += atom.probability * std::exp(t * atom.value);
    } else {
      const auto sample = std::get<std::span<const double>>(law);
      if (sample.size() < 2) throw InputError("sampled MGF check needs at least two draws");
      double sum = 0.0;
      double sum_sq = 0.0;
      for (double z : sample) {
        const double e = std::exp(t * z);
        sum += e;
        sum_sq += e * e;
      }
      const double n = static_cast<double>(sample.size());
      mgf = sum / n;
      const double var = std::max(0.0, (sum_sq / n - mgf * mgf) * n / (n - 1.0));
      margin = kMgfStandardErrors * std::sqrt(var / n);
    }
    report.max_ratio = std::max(report.max_ratio, mgf / bound);
    if (mgf > bound + margin) report.passed = false;
  }
  return report;
}

std::vector<double> admissible_t_grid(double v, double b, std::size_t points, double coverage) {
  if (points < 2) throw InputError("t grid needs at least two points");
  double t_max = 0.0;
  if (b > 0.0) {
    t_max = coverage / b;
  } else {
    t_max = v > 0.0 ? 2.0 / std::sqrt(v) : 1.0;
  }
  std::vector<double> grid(points);
  for (std::size_t g = 0; g < points; ++g) {
    grid[g] = -t_max + 2.0 * t_max * static_cast<double>(g) / static_cast<double>(points - 1);
  }
  return grid;
}

std::vector<DiscreteLaw> conditional_zeta_laws(const NoiseModel& model, double alpha) {
  std::vector<DiscreteLaw> laws;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CenteredBernoulli>) {
          for (double rho : p.rho) {
            laws.push_back(bernoulli_coupling_law(1.0 - rho, rho, alpha));
            laws.push_back(bernoulli_coupling_law(-rho, rho, alpha));
          }
        } else if constexpr (std::is_same_v<T, BoundedBinaryMixture>) {
          for (const auto& coordinate : p.mixing) {
            for (const auto& ab : coordinate) {
              if (ab.b > 0.0) laws.push_back(binary_coupling_law(ab.a, ab.b, ab.a, alpha));
              if (ab.a > 0.0) laws.push_back(binary_coupling_law(ab.a, ab.b, -ab.b, alpha));
            }
          }
        } else if constexpr (std::is_same_v<T, CenteredBinomial>) {
          // Given the etas, zeta = a * (sum of independent per-eta laws); the
          // law depends only on how many eta_j sit at 1 - rho.
          for (double rho : p.rho) {
            const DiscreteLaw up = bernoulli_coupling_law(1.0 - rho, rho, alpha);
            const DiscreteLaw down = bernoulli_coupling_law(-rho, rho, alpha);
            for (int ups = 0; ups <= p.k; ++ups) {
              std::vector<LawAtom> acc{{0.0, 1.0}};
              for (int j = 0; j < p.k; ++j) {
                const DiscreteLaw& term = j < ups ? up : down;
                std::vector<LawAtom> next;
                for (const auto& x : acc) {
                  for (const auto& z : term.atoms()) next.push_back({x.value + z.value, x.probability * z.probability});
                }
                const DiscreteLaw merged = DiscreteLaw::from_atoms(std::move(next));
                acc.assign(merged.atoms().begin(), merged.atoms().end());
              }
              laws.push_back(DiscreteLaw::from_atoms(std::move(acc)).scaled(p.a));
            }
          }
        }
      },
      model.params());
  return laws;
}

MgfReport verify_bernstein(const NoiseModel& model, double alpha, std::size_t t_points, std::size_t sample_size,
                           Rng& rng) {
  const BernsteinProfile profile = profile_for(model);
  const double v = profile.v(alpha);
  const double b = profile.b(alpha);
  const double c = profile.mgf_normalization;
  const std::vector<double> grid = admissible_t_grid(v, b, t_points);

  MgfReport total;
  total.points = grid.size();
  auto fold = [&](const MgfReport& r) {
    total.max_ratio = std::max(total.max_ratio, r.max_ratio);
    total.passed = total.passed && r.passed;
  };

  const Family f = model.family();
  if (f != Family::gaussian && f != Family::laplace) {
    for (const DiscreteLaw& law : conditional_zeta_laws(model, alpha)) fold(mgf_bound_check(law, v, b, c, grid));
    return total;
  }

  if (sample_size < 2) throw InputError("sampled MGF check needs sample_size >= 2");
  std::vector<double> seen;
  const auto& scales = f == Family::gaussian ? std::get<Gaussian>(model.params()).sigma
                                             : std::get<Laplace>(model.params()).mu;
  for (double scale : scales) {
    if (std::find(seen.begin(), seen.end(), scale) != seen.end()) continue;
    seen.push_back(scale);
    std::vector<double> zeta(sample_size);
    for (double& z : zeta) z = f == Family::gaussian ? couple_gaussian(scale, alpha, rng) : couple_laplace(scale, alpha, rng);
    fold(mgf_bound_check(std::span<const double>(zeta), v, b, c, grid));
  }
  return total;
}

double beta_threshold(const BernsteinProfile& profile, SupportDiameter d0) {
  if (!(d0.value >= 0.0)) throw InputError("support diameter must be nonnegative");
  return 2.0 * profile.v_prime_0 + 2.0 * profile.b_0 * d0.value;
}

double variance_penalty_coefficient(double beta, const BernsteinProfile& profile, SupportDiameter d0) {
  const double floor = 2.0 * profile.b_0 * d0.value;
  if (!(beta > floor)) throw InputError("beta must exceed 2 b(0) d0 for a finite variance penalty");
  return 2.0 * profile.v_prime_0 / (beta - floor) - 1.0;
}

}  // namespace ewa_agg
