#include "ewa_agg/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>

namespace ewa_agg {
namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in (0,1]");
}

bool matches(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y)); }

double sample_from(const DiscreteLaw& law, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double acc = 0.0;
  for (const auto& atom : law.atoms()) {
    acc += atom.probability;
    if (u < acc) return atom.value;
  }
  return law.atoms().back().value;
}

std::vector<double> coordinate_key(const NoiseModel& model, std::size_t i) {
  return std::visit(
      [&](const auto& p) -> std::vector<double> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CenteredBernoulli>) {
          return {p.rho[i]};
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return {p.sigma[i]};
        } else if constexpr (std::is_same_v<T, BoundedBinaryMixture>) {
          std::vector<double> key;
          for (const auto& ab : p.mixing[i]) key.insert(key.end(), {ab.a, ab.b, ab.probability});
          return key;
        } else if constexpr (std::is_same_v<T, CenteredBinomial>) {
          return {p.a, static_cast<double>(p.k), p.rho[i]};
        } else {
          return {p.mu[i]};
        }
      },
      model.params());
}

std::vector<std::size_t> distinct_coordinates(const NoiseModel& model) {
  std::vector<std::vector<double>> seen;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < model.dimension(); ++i) {
    auto key = coordinate_key(model, i);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(std::move(key));
    out.push_back(i);
  }
  return out;
}

struct ExactOutcome {
  double atom_error = 0.0;
  double mean_error = 0.0;
};

// Enumerates every branch of (xi, zeta) for coordinate i, accumulating the
// law of xi + zeta and the conditional mean of zeta for each latent record.
ExactOutcome enumerate_coordinate(const NoiseModel& model, std::size_t i, double alpha) {
  std::vector<LawAtom> sum_atoms;
  double mean_error = 0.0;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CenteredBernoulli>) {
          const double rho = p.rho[i];
          for (const double xi : {1.0 - rho, -rho}) {
            const double mass = xi > 0.0 ? rho : 1.0 - rho;
            double cond_mean = 0.0;
            for (const DiscreteLaw law_z = bernoulli_coupling_law(xi, rho, alpha); const auto& z : law_z.atoms()) {
              sum_atoms.push_back({xi + z.value, mass * z.probability});
              cond_mean += z.value * z.probability;
            }
            mean_error = std::max(mean_error, std::abs(cond_mean));
          }
        } else if constexpr (std::is_same_v<T, BoundedBinaryMixture>) {
          for (const auto& ab : p.mixing[i]) {
            for (const double eta : {ab.a, -ab.b}) {
              const double mass = ab.probability * (eta == ab.a ? ab.b : ab.a) / (ab.a + ab.b);
              if (mass == 0.0) continue;
              double cond_mean = 0.0;
              for (const DiscreteLaw law_z = binary_coupling_law(ab.a, ab.b, eta, alpha); const auto& z : law_z.atoms()) {
                sum_atoms.push_back({eta + z.value, mass * z.probability});
                cond_mean += z.value * z.probability;
              }
              mean_error = std::max(mean_error, std::abs(cond_mean));
            }
          }
        } else if constexpr (std::is_same_v<T, CenteredBinomial>) {
          if (p.k > 10) throw InputError("exact enumeration supports k <= 10");
          const double rho = p.rho[i];
          const std::size_t k = static_cast<std::size_t>(p.k);
          const std::size_t configs = std::size_t{1} << k;
          std::vector<DiscreteLaw> per_eta;
          for (std::size_t eta_mask = 0; eta_mask < configs; ++eta_mask) {
            double mass = 1.0;
            std::vector<double> eta(k);
            per_eta.clear();
            for (std::size_t j = 0; j < k; ++j) {
              const bool up = (eta_mask >> j) & 1U;
              eta[j] = up ? 1.0 - rho : -rho;
              mass *= up ? rho : 1.0 - rho;
              per_eta.push_back(bernoulli_coupling_law(eta[j], rho, alpha));
            }
            // Walk the product of the k per-eta branch lists.
            std::vector<std::size_t> idx(k, 0);
            double cond_mean = 0.0;
            while (true) {
              double branch_mass = 1.0;
              double eta_plus_zeta = 0.0;
              double zeta = 0.0;
              for (std::size_t j = 0; j < k; ++j) {
                const auto& z = per_eta[j].atoms()[idx[j]];
                branch_mass *= z.probability;
                eta_plus_zeta += eta[j] + z.value;
                zeta += z.value;
              }
              sum_atoms.push_back({p.a * eta_plus_zeta, mass * branch_mass});
              cond_mean += branch_mass * p.a * zeta;
              std::size_t j = 0;
              while (j < k && ++idx[j] == per_eta[j].size()) idx[j++] = 0;
              if (j == k) break;
            }
            mean_error = std::max(mean_error, std::abs(cond_mean));
          }
        } else {
          throw InputError("exact coupling check requires a discrete noise family");
        }
      },
      model.params());

  const DiscreteLaw target = exact_law(model, i)->scaled(1.0 + alpha);
  const DiscreteLaw coupled = DiscreteLaw::from_atoms(std::move(sum_atoms));
  return {max_atom_error(coupled, target), mean_error};
}

double coordinate_scale(const NoiseModel& model, std::size_t i) {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return p.sigma[i];
        } else if constexpr (std::is_same_v<T, Laplace>) {
          return p.mu[i];
        } else {
          return std::sqrt(law_mean_and_variance(*exact_law(model, i)).second);
        }
      },
      model.params());
}

double max_cf_error(std::span<const double> lhs, std::span<const double> rhs, double scale) {
  const double t_max = 5.0 / scale;
  double worst = 0.0;
  for (std::size_t g = 0; g < kCfGridPoints; ++g) {
    const double t = -t_max + 2.0 * t_max * static_cast<double>(g) / static_cast<double>(kCfGridPoints - 1);
    auto empirical = [t](std::span<const double> xs) {
      double re = 0.0;
      double im = 0.0;
      for (double x : xs) {
        re += std::cos(t * x);
        im += std::sin(t * x);
      }
      const double n = static_cast<double>(xs.size());
      return std::complex<double>(re / n, im / n);
    };
    worst = std::max(worst, std::abs(empirical(lhs) - empirical(rhs)));
  }
  return worst;
}

}  // namespace

DiscreteLaw bernoulli_coupling_law(double xi_value, double rho, double alpha) {
  check_alpha(alpha);
  if (!(rho > 0.0 && rho < 1.0)) throw InputError("rho must lie in (0,1)");
  if (!matches(xi_value, 1.0 - rho) && !matches(xi_value, -rho)) {
    throw InputError("xi value is not in the centered Bernoulli support");
  }
  if (alpha == 0.0) return DiscreteLaw::from_atoms({{0.0, 1.0}});
  const double mag = std::abs(xi_value);
  const double sign = xi_value > 0.0 ? 1.0 : -1.0;
  const double stay = (1.0 + alpha - alpha * mag) / (1.0 + alpha);
  const double jump = alpha * mag / (1.0 + alpha);
  return DiscreteLaw::from_atoms({{alpha * xi_value, stay}, {-sign * (1.0 + alpha - alpha * mag), jump}});
}

DiscreteLaw binary_coupling_law(double a, double b, double eta_value, double alpha) {
  check_alpha(alpha);
  if (!(a >= 0.0 && b >= 0.0 && a + b > 0.0)) throw InputError("binary coupling needs a, b >= 0 and a + b > 0");
  const bool at_a = matches(eta_value, a);
  if (!at_a && !matches(eta_value, -b)) throw InputError("eta value is not in {a, -b}");
  if (alpha == 0.0) return DiscreteLaw::from_atoms({{0.0, 1.0}});
  const double denom = (1.0 + alpha) * (a + b);
  if (at_a) {
    const double stay = ((1.0 + alpha) * b + a) / denom;
    return DiscreteLaw::from_atoms({{alpha * a, stay}, {-(1.0 + alpha) * b - a, 1.0 - stay}});
  }
  const double stay = ((1.0 + alpha) * a + b) / denom;
  return DiscreteLaw::from_atoms({{-alpha * b, stay}, {(1.0 + alpha) * a + b, 1.0 - stay}});
}

double couple_bernoulli(double xi_value, double rho, double alpha, Rng& rng) {
  return sample_from(bernoulli_coupling_law(xi_value, rho, alpha), rng);
}

double couple_binary(double a, double b, double eta_value, double alpha, Rng& rng) {
  return sample_from(binary_coupling_law(a, b, eta_value, alpha), rng);
}

double couple_gaussian(double sigma, double alpha, Rng& rng) {
  check_alpha(alpha);
  if (!(sigma > 0.0)) throw InputError("sigma must be positive");
  if (alpha == 0.0) return 0.0;
  std::normal_distribution<double> normal(0.0, sigma * std::sqrt(2.0 * alpha + alpha * alpha));
  return normal(rng);
}

double couple_binomial(std::span<const double> eta_values, double rho, double a, double alpha, Rng& rng) {
  if (eta_values.empty()) throw InputError("binomial coupling needs k >= 1 eta values");
  double total = 0.0;
  for (double eta : eta_values) total += couple_bernoulli(eta, rho, alpha, rng);
  return a * total;
}

double couple_laplace(double mu, double alpha, Rng& rng) {
  check_alpha(alpha);
  if (!(mu > 0.0)) throw InputError("mu must be positive");
  const double point_mass = 1.0 / ((1.0 + alpha) * (1.0 + alpha));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < point_mass) return 0.0;
  return sample_laplace((1.0 + alpha) * mu, rng);
}

CoordinateDraw draw_coupled_coordinate(const NoiseModel& model, std::size_t i, double alpha, Rng& rng) {
  check_alpha(alpha);
  return std::visit(
      [&](const auto& p) -> CoordinateDraw {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CenteredBernoulli>) {
          const double xi = sample_noise_coordinate(model, i, rng);
          return {xi, couple_bernoulli(xi, p.rho[i], alpha, rng), {xi}};
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          const double xi = sample_noise_coordinate(model, i, rng);
          return {xi, couple_gaussian(p.sigma[i], alpha, rng), {xi}};
        } else if constexpr (std::is_same_v<T, BoundedBinaryMixture>) {
          const auto& ab = pick_mixing_atom(p.mixing[i], rng);
          std::bernoulli_distribution up(ab.b / (ab.a + ab.b));
          const double eta = up(rng) ? ab.a : -ab.b;
          return {eta, couple_binary(ab.a, ab.b, eta, alpha, rng), {ab.a, ab.b, eta}};
        } else if constexpr (std::is_same_v<T, CenteredBinomial>) {
          std::bernoulli_distribution up(p.rho[i]);
          std::vector<double> eta(static_cast<std::size_t>(p.k));
          double sum = 0.0;
          for (double& e : eta) {
            e = up(rng) ? 1.0 - p.rho[i] : -p.rho[i];
            sum += e;
          }
          const double zeta = couple_binomial(eta, p.rho[i], p.a, alpha, rng);
          return {p.a * sum, zeta, std::move(eta)};
        } else {
          const double xi = sample_noise_coordinate(model, i, rng);
          return {xi, couple_laplace(p.mu[i], alpha, rng), {xi}};
        }
      },
      model.params());
}

CouplingDraw draw_coupled(const NoiseModel& model, double alpha, Rng& rng) {
  const std::size_t n = model.dimension();
  std::vector<double> xi(n);
  std::vector<double> zeta(n);
  ConditioningRecord record(n);
  for (std::size_t i = 0; i < n; ++i) {
    CoordinateDraw d = draw_coupled_coordinate(model, i, alpha, rng);
    xi[i] = d.xi;
    zeta[i] = d.zeta;
    record[i] = std::move(d.record);
  }
  return {SignalVector(std::move(xi)), SignalVector(std::move(zeta)), alpha, std::move(record)};
}

std::string_view to_string(CouplingMethod method) {
  switch (method) {
    case CouplingMethod::exact: return "exact";
    case CouplingMethod::ks: return "ks";
    case CouplingMethod::cf_grid: return "cf_grid";
  }
  return "unknown";
}

CouplingMethod parse_coupling_method(std::string_view name) {
  for (CouplingMethod m : {CouplingMethod::exact, CouplingMethod::ks, CouplingMethod::cf_grid}) {
    if (to_string(m) == name) return m;
  }
  throw InputError("unknown coupling method '" + std::string(name) + "'");
}

double ks_two_sample_statistic(std::vector<double>& lhs, std::vector<double>& rhs) {
  if (lhs.empty() || rhs.empty()) throw InputError("KS test needs nonempty samples");
  std::sort(lhs.begin(), lhs.end());
  std::sort(rhs.begin(), rhs.end());
  const double nl = static_cast<double>(lhs.size());
  const double nr = static_cast<double>(rhs.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < lhs.size() && j < rhs.size()) {
    // values within rounding of each other count as ties (discrete laws built two ways)
    const double x = std::min(lhs[i], rhs[j]);
    const double cut = x + 1e-12 * std::max(1.0, std::abs(x));
    while (i < lhs.size() && lhs[i] <= cut) ++i;
    while (j < rhs.size() && rhs[j] <= cut) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nl - static_cast<double>(j) / nr));
  }
  return d;
}

double ks_critical_value(std::size_t n_lhs, std::size_t n_rhs, double significance) {
  const double nl = static_cast<double>(n_lhs);
  const double nr = static_cast<double>(n_rhs);
  return std::sqrt(-0.5 * std::log(significance / 2.0)) * std::sqrt((nl + nr) / (nl * nr));
}

CouplingReport verify_coupling(const NoiseModel& model, double alpha, CouplingMethod method, std::size_t sample_size,
                               Rng& rng) {
  check_alpha(alpha);
  CouplingReport report;
  report.family = model.family();
  report.alpha = alpha;
  report.method = method;

  if (method == CouplingMethod::exact) {
    const Family f = model.family();
    if (f == Family::gaussian || f == Family::laplace) {
      throw InputError("method 'exact' requires a discrete noise family");
    }
    report.threshold = kExactTolerance;
    report.mean_zero_threshold = kExactTolerance;
    for (std::size_t i : distinct_coordinates(model)) {
      const ExactOutcome o = enumerate_coordinate(model, i, alpha);
      report.statistic = std::max(report.statistic, o.atom_error);
      report.mean_zero = std::max(report.mean_zero, o.mean_error);
    }
    report.passed = report.statistic <= report.threshold && report.mean_zero <= report.mean_zero_threshold;
    return report;
  }

  if (sample_size < 2) throw InputError("sampled coupling checks need sample_size >= 2");
  report.sample_size = sample_size;
  report.passed = true;
  const double n = static_cast<double>(sample_size);
  for (std::size_t i : distinct_coordinates(model)) {
    std::vector<double> coupled(sample_size);
    std::vector<double> scaled(sample_size);
    double zeta_sum = 0.0;
    double zeta_sq = 0.0;
    for (std::size_t s = 0; s < sample_size; ++s) {
      const CoordinateDraw d = draw_coupled_coordinate(model, i, alpha, rng);
      coupled[s] = d.xi + d.zeta;
      zeta_sum += d.zeta;
      zeta_sq += d.zeta * d.zeta;
    }
    for (std::size_t s = 0; s < sample_size; ++s) scaled[s] = (1.0 + alpha) * sample_noise_coordinate(model, i, rng);

    const double zeta_mean = zeta_sum / n;
    const double zeta_sd = std::sqrt(std::max(0.0, zeta_sq / n - zeta_mean * zeta_mean));
    const double mean_threshold = 5.0 * zeta_sd / std::sqrt(n);

    double statistic = 0.0;
    double threshold = 0.0;
    bool ok = false;
    if (method == CouplingMethod::ks) {
      statistic = ks_two_sample_statistic(coupled, scaled);
      threshold = ks_critical_value(sample_size, sample_size, kKsSignificance);
      ok = statistic <= threshold;
    } else {
      statistic = max_cf_error(coupled, scaled, coordinate_scale(model, i));
      threshold = 5.0 / std::sqrt(n);
      ok = statistic < threshold;
    }
    ok = ok && std::abs(zeta_mean) <= mean_threshold;
    if (statistic >= report.statistic) {
      report.statistic = statistic;
      report.threshold = threshold;
    }
    if (std::abs(zeta_mean) >= report.mean_zero) {
      report.mean_zero = std::abs(zeta_mean);
      report.mean_zero_threshold = mean_threshold;
    }
    report.passed = report.passed && ok;
  }
  return report;
}

}  // namespace ewa_agg
