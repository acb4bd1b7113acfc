#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ewa_agg/model.hpp"
#include "ewa_agg/rng.hpp"

namespace ewa_agg {

enum class Family { centered_bernoulli, gaussian, bounded_binary_mixture, centered_binomial, laplace };

std::string_view to_string(Family family);
/// Parses the serialized family name; throws InputError on an unknown name.
Family parse_family(std::string_view name);

// Per-coordinate parameter sets, one variant per noise family.

/// xi_i takes 1 - rho_i with probability rho_i and -rho_i otherwise.
struct CenteredBernoulli {
  std::vector<double> rho;
};

struct Gaussian {
  std::vector<double> sigma;
};

struct MixingAtom {
  double a = 0.0;
  double b = 0.0;
  double probability = 0.0;
};

/// xi_i is drawn by first picking (a, b) from a finite mixing law, then
/// taking a with probability b/(a+b) and -b with probability a/(a+b).
struct BoundedBinaryMixture {
  double a_max = 0.0;
  double b_max = 0.0;
  std::vector<std::vector<MixingAtom>> mixing;  // one list per coordinate
};

/// xi_i = a * (Binomial(k, rho_i) - k rho_i).
struct CenteredBinomial {
  double a = 1.0;
  int k = 1;
  std::vector<double> rho;
};

/// Density (2 mu_i)^-1 exp(-|x| / mu_i).
struct Laplace {
  std::vector<double> mu;
};

/// Validated tagged union over the five families. Immutable once built.
class NoiseModel {
 public:
  using Params = std::variant<CenteredBernoulli, Gaussian, BoundedBinaryMixture, CenteredBinomial, Laplace>;

  explicit NoiseModel(Params params);

  static NoiseModel centered_bernoulli(std::size_t n, double rho);
  static NoiseModel gaussian(std::size_t n, double sigma);
  static NoiseModel bounded_binary_mixture(std::size_t n, double a_max, double b_max,
                                           std::vector<MixingAtom> mixing);
  static NoiseModel centered_binomial(std::size_t n, double a, int k, double rho);
  static NoiseModel laplace(std::size_t n, double mu);

  Family family() const;
  std::size_t dimension() const { return dimension_; }
  const Params& params() const { return params_; }

 private:
  Params params_;
  std::size_t dimension_ = 0;
};

struct LawAtom {
  double value = 0.0;
  double probability = 0.0;
};

/// Finite-support law with distinct values, sorted ascending.
class DiscreteLaw {
 public:
  /// Merges atoms whose values agree to ~1e-12 relative, drops zero-mass
  /// atoms, and checks the masses sum to 1 within 1e-12.
  static DiscreteLaw from_atoms(std::vector<LawAtom> atoms);

  std::span<const LawAtom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  /// Law of factor * X.
  DiscreteLaw scaled(double factor) const;

 private:
  explicit DiscreteLaw(std::vector<LawAtom> atoms) : atoms_(std::move(atoms)) {}
  std::vector<LawAtom> atoms_;
};

/// Largest absolute difference in mass over the union of the two supports,
/// with values matched to ~1e-12 relative.
double max_atom_error(const DiscreteLaw& lhs, const DiscreteLaw& rhs);

/// One draw of the full noise vector; coordinates independent.
SignalVector sample_noise(const NoiseModel& model, Rng& rng);

/// One draw of coordinate i alone.
double sample_noise_coordinate(const NoiseModel& model, std::size_t i, Rng& rng);

/// Draws one (a, b) pair from a finite mixing law.
const MixingAtom& pick_mixing_atom(std::span<const MixingAtom> mixing, Rng& rng);

/// Exact law of coordinate i for the discrete families; std::nullopt marks a
/// continuous family (Gaussian, Laplace).
std::optional<DiscreteLaw> exact_law(const NoiseModel& model, std::size_t coordinate);

/// Exact (mean, variance).
std::pair<double, double> law_mean_and_variance(const DiscreteLaw& law);

/// Uniform draw on the open interval (0, 1).
double open_unit_uniform(Rng& rng);

/// Inverse-CDF Laplace draw with scale mu.
double sample_laplace(double mu, Rng& rng);

}  // namespace ewa_agg
