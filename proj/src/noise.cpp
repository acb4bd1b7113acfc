#include "ewa_agg/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace ewa_agg {
namespace {

constexpr double kMassTolerance = 1e-12;

bool same_value(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::max(std::abs(x), std::abs(y))); }

void check_open_unit(const std::vector<double>& rho, const char* name) {
  for (double r : rho) {
    if (!(r > 0.0 && r < 1.0)) throw InputError(std::string(name) + " must lie in (0,1)");
  }
}

void check_positive(const std::vector<double>& xs, const char* name) {
  for (double x : xs) {
    if (!(x > 0.0) || !std::isfinite(x)) throw InputError(std::string(name) + " must be positive");
  }
}

struct Validator {
  std::size_t operator()(const CenteredBernoulli& p) const {
    check_open_unit(p.rho, "rho");
    return p.rho.size();
  }
  std::size_t operator()(const Gaussian& p) const {
    check_positive(p.sigma, "sigma");
    return p.sigma.size();
  }
  std::size_t operator()(const BoundedBinaryMixture& p) const {
    if (!(p.a_max >= 0.0) || !(p.b_max >= 0.0) || !std::isfinite(p.a_max) || !std::isfinite(p.b_max)) {
      throw InputError("a_max and b_max must be finite and nonnegative");
    }
    for (const auto& coordinate : p.mixing) {
      if (coordinate.empty()) throw InputError("mixing list must be nonempty");
      double total = 0.0;
      for (const auto& atom : coordinate) {
        if (!(atom.a >= 0.0 && atom.a <= p.a_max)) throw InputError("mixing a must lie in [0, a_max]");
        if (!(atom.b >= 0.0 && atom.b <= p.b_max)) throw InputError("mixing b must lie in [0, b_max]");
        if (!(atom.a + atom.b > 0.0)) throw InputError("mixing atoms need a + b > 0");
        if (!(atom.probability >= 0.0)) throw InputError("mixing probabilities must be nonnegative");
        total += atom.probability;
      }
      if (std::abs(total - 1.0) > kMassTolerance) throw InputError("mixing probabilities must sum to one");
    }
    return p.mixing.size();
  }
  std::size_t operator()(const CenteredBinomial& p) const {
    if (!(p.a > 0.0) || !std::isfinite(p.a)) throw InputError("binomial scale a must be positive");
    if (p.k < 1) throw InputError("binomial k must be a positive integer");
    check_open_unit(p.rho, "rho");
    return p.rho.size();
  }
  std::size_t operator()(const Laplace& p) const {
    check_positive(p.mu, "mu");
    return p.mu.size();
  }
};

double binomial_pmf(int k, int j, double rho) {
  double coeff = 1.0;
  for (int i = 1; i <= j; ++i) coeff = coeff * static_cast<double>(k - j + i) / static_cast<double>(i);
  return coeff * std::pow(rho, j) * std::pow(1.0 - rho, k - j);
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::centered_bernoulli: return "centered_bernoulli";
    case Family::gaussian: return "gaussian";
    case Family::bounded_binary_mixture: return "bounded_binary_mixture";
    case Family::centered_binomial: return "centered_binomial";
    case Family::laplace: return "laplace";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::centered_bernoulli, Family::gaussian, Family::bounded_binary_mixture,
                   Family::centered_binomial, Family::laplace}) {
    if (to_string(f) == name) return f;
  }
  throw InputError("unknown noise family '" + std::string(name) + "'");
}

NoiseModel::NoiseModel(Params params) : params_(std::move(params)) {
  dimension_ = std::visit(Validator{}, params_);
  if (dimension_ == 0) throw InputError("noise model must have dimension n >= 1");
}

NoiseModel NoiseModel::centered_bernoulli(std::size_t n, double rho) {
  return NoiseModel(CenteredBernoulli{std::vector<double>(n, rho)});
}

NoiseModel NoiseModel::gaussian(std::size_t n, double sigma) { return NoiseModel(Gaussian{std::vector<double>(n, sigma)}); }

NoiseModel NoiseModel::bounded_binary_mixture(std::size_t n, double a_max, double b_max,
                                              std::vector<MixingAtom> mixing) {
  return NoiseModel(BoundedBinaryMixture{a_max, b_max, std::vector<std::vector<MixingAtom>>(n, mixing)});
}

NoiseModel NoiseModel::centered_binomial(std::size_t n, double a, int k, double rho) {
  return NoiseModel(CenteredBinomial{a, k, std::vector<double>(n, rho)});
}

NoiseModel NoiseModel::laplace(std::size_t n, double mu) { return NoiseModel(Laplace{std::vector<double>(n, mu)}); }

Family NoiseModel::family() const { return static_cast<Family>(params_.index()); }

DiscreteLaw DiscreteLaw::from_atoms(std::vector<LawAtom> atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const LawAtom& x, const LawAtom& y) { return x.value < y.value; });
  std::vector<LawAtom> merged;
  double total = 0.0;
  for (const auto& atom : atoms) {
    if (!(atom.probability >= 0.0) || !std::isfinite(atom.value)) throw InputError("invalid law atom");
    total += atom.probability;
    if (atom.probability == 0.0) continue;
    if (!merged.empty() && same_value(merged.back().value, atom.value)) {
      merged.back().probability += atom.probability;
    } else {
      merged.push_back(atom);
    }
  }
  if (merged.empty() || std::abs(total - 1.0) > kMassTolerance) throw InputError("law masses must sum to one");
  return DiscreteLaw(std::move(merged));
}

DiscreteLaw DiscreteLaw::scaled(double factor) const {
  std::vector<LawAtom> out(atoms_.begin(), atoms_.end());
  for (auto& atom : out) atom.value *= factor;
  return from_atoms(std::move(out));
}

double max_atom_error(const DiscreteLaw& lhs, const DiscreteLaw& rhs) {
  const auto l = lhs.atoms();
  const auto r = rhs.atoms();
  std::size_t i = 0;
  std::size_t j = 0;
  double worst = 0.0;
  while (i < l.size() || j < r.size()) {
    if (i < l.size() && j < r.size() && same_value(l[i].value, r[j].value)) {
      worst = std::max(worst, std::abs(l[i].probability - r[j].probability));
      ++i;
      ++j;
    } else if (j >= r.size() || (i < l.size() && l[i].value < r[j].value)) {
      worst = std::max(worst, l[i].probability);
      ++i;
    } else {
      worst = std::max(worst, r[j].probability);
      ++j;
    }
  }
  return worst;
}

double open_unit_uniform(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = 0.0;
  do {
    u = unit(rng);
  } while (u <= 0.0);
  return u;
}

double sample_laplace(double mu, Rng& rng) {
  const double u = open_unit_uniform(rng) - 0.5;
  const double magnitude = -mu * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -magnitude : magnitude;
}

double sample_noise_coordinate(const NoiseModel& model, std::size_t i, Rng& rng) {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CenteredBernoulli>) {
          std::bernoulli_distribution hit(p.rho[i]);
          return hit(rng) ? 1.0 - p.rho[i] : -p.rho[i];
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          std::normal_distribution<double> normal(0.0, p.sigma[i]);
          return normal(rng);
        } else if constexpr (std::is_same_v<T, BoundedBinaryMixture>) {
          const auto& ab = pick_mixing_atom(p.mixing[i], rng);
          std::bernoulli_distribution up(ab.b / (ab.a + ab.b));
          return up(rng) ? ab.a : -ab.b;
        } else if constexpr (std::is_same_v<T, CenteredBinomial>) {
          std::binomial_distribution<int> binom(p.k, p.rho[i]);
          return p.a * (static_cast<double>(binom(rng)) - p.k * p.rho[i]);
        } else {
          return sample_laplace(p.mu[i], rng);
        }
      },
      model.params());
}

SignalVector sample_noise(const NoiseModel& model, Rng& rng) {
  std::vector<double> xi(model.dimension());
  for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = sample_noise_coordinate(model, i, rng);
  return SignalVector(std::move(xi));
}

const MixingAtom& pick_mixing_atom(std::span<const MixingAtom> mixing, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double acc = 0.0;
  for (const auto& atom : mixing) {
    acc += atom.probability;
    if (u < acc) return atom;
  }
  return mixing.back();
}

std::optional<DiscreteLaw> exact_law(const NoiseModel& model, std::size_t coordinate) {
  if (coordinate >= model.dimension()) throw InputError("coordinate out of range");
  const std::size_t i = coordinate;
  return std::visit(
      [&](const auto& p) -> std::optional<DiscreteLaw> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CenteredBernoulli>) {
          return DiscreteLaw::from_atoms({{1.0 - p.rho[i], p.rho[i]}, {-p.rho[i], 1.0 - p.rho[i]}});
        } else if constexpr (std::is_same_v<T, BoundedBinaryMixture>) {
          std::vector<LawAtom> atoms;
          for (const auto& ab : p.mixing[i]) {
            atoms.push_back({ab.a, ab.probability * ab.b / (ab.a + ab.b)});
            atoms.push_back({-ab.b, ab.probability * ab.a / (ab.a + ab.b)});
          }
          return DiscreteLaw::from_atoms(std::move(atoms));
        } else if constexpr (std::is_same_v<T, CenteredBinomial>) {
          std::vector<LawAtom> atoms;
          for (int j = 0; j <= p.k; ++j) {
            atoms.push_back({p.a * (j - p.k * p.rho[i]), binomial_pmf(p.k, j, p.rho[i])});
          }
          return DiscreteLaw::from_atoms(std::move(atoms));
        } else {
          return std::nullopt;
        }
      },
      model.params());
}

std::pair<double, double> law_mean_and_variance(const DiscreteLaw& law) {
  double mean = 0.0;
  for (const auto& atom : law.atoms()) mean += atom.value * atom.probability;
  double var = 0.0;
  for (const auto& atom : law.atoms()) {
    const double d = atom.value - mean;
    var += d * d * atom.probability;
  }
  return {mean, var};
}

}  // namespace ewa_agg
