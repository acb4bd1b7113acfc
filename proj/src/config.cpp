#include "ewa_agg/config.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace ewa_agg {
namespace {

using nlohmann::json;

const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw InputError(std::string("missing key '") + key + "'");
  return doc.at(key);
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw InputError("'" + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> numbers(const json& v, const std::string& key) {
  if (!v.is_array()) throw InputError("'" + key + "' must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(number(x, key));
  return out;
}

// Scalar or per-coordinate array of length n.
std::vector<double> per_coordinate(const json& params, const char* key, std::size_t n) {
  const json& v = require(params, key);
  if (v.is_number()) return std::vector<double>(n, v.get<double>());
  std::vector<double> out = numbers(v, key);
  if (out.size() != n) throw InputError(std::string("'") + key + "' must have one entry per coordinate");
  return out;
}

std::vector<MixingAtom> mixing_list(const json& v) {
  if (!v.is_array() || v.empty()) throw InputError("'mixing' must be a nonempty array");
  std::vector<MixingAtom> out;
  for (const auto& atom : v) {
    out.push_back({number(require(atom, "a"), "mixing.a"), number(require(atom, "b"), "mixing.b"),
                   number(require(atom, "p"), "mixing.p")});
  }
  return out;
}

std::size_t positive_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 1) throw InputError("'" + key + "' must be a positive integer");
  return v.get<std::size_t>();
}

json beta_to_json(double beta) {
  if (std::isinf(beta)) return "inf";
  return beta;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(beta > 0.0)) throw InputError("beta must be positive");
  if (replicates < 1) throw InputError("replicates must be at least 1");
  if (prior_samples && *prior_samples < 1) throw InputError("prior_samples must be positive");
  if (prior.size() != dictionary.size()) throw InputError("prior must have one weight per dictionary atom");
  if (dictionary.dimension() != truth.size()) throw InputError("dictionary atoms must match the dimension of truth");
  if (noise.dimension() != truth.size()) throw InputError("noise must match the dimension of truth");
}

NoiseModel noise_from_json(const json& doc, std::size_t n) {
  const json& family_field = require(doc, "family");
  if (!family_field.is_string()) throw InputError("'noise.family' must be a string");
  const Family family = parse_family(family_field.get<std::string>());
  const json& params = require(doc, "params");
  switch (family) {
    case Family::centered_bernoulli:
      return NoiseModel(CenteredBernoulli{per_coordinate(params, "rho", n)});
    case Family::gaussian:
      return NoiseModel(Gaussian{per_coordinate(params, "sigma", n)});
    case Family::bounded_binary_mixture: {
      BoundedBinaryMixture p;
      p.a_max = number(require(params, "a_max"), "a_max");
      p.b_max = number(require(params, "b_max"), "b_max");
      const json& mixing = require(params, "mixing");
      if (mixing.is_array() && !mixing.empty() && mixing.front().is_array()) {
        if (mixing.size() != n) throw InputError("'mixing' must have one list per coordinate");
        for (const auto& coordinate : mixing) p.mixing.push_back(mixing_list(coordinate));
      } else {
        p.mixing.assign(n, mixing_list(mixing));
      }
      return NoiseModel(std::move(p));
    }
    case Family::centered_binomial: {
      const json& k = require(params, "k");
      return NoiseModel(CenteredBinomial{number(require(params, "a"), "a"),
                                         static_cast<int>(positive_integer(k, "k")), per_coordinate(params, "rho", n)});
    }
    case Family::laplace:
      return NoiseModel(Laplace{per_coordinate(params, "mu", n)});
  }
  throw InputError("unknown noise family");
}

json noise_to_json(const NoiseModel& model) {
  json params = json::object();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CenteredBernoulli>) {
          params["rho"] = p.rho;
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          params["sigma"] = p.sigma;
        } else if constexpr (std::is_same_v<T, BoundedBinaryMixture>) {
          params["a_max"] = p.a_max;
          params["b_max"] = p.b_max;
          json mixing = json::array();
          for (const auto& coordinate : p.mixing) {
            json list = json::array();
            for (const auto& ab : coordinate) list.push_back({{"a", ab.a}, {"b", ab.b}, {"p", ab.probability}});
            mixing.push_back(std::move(list));
          }
          params["mixing"] = std::move(mixing);
        } else if constexpr (std::is_same_v<T, CenteredBinomial>) {
          params["a"] = p.a;
          params["k"] = p.k;
          params["rho"] = p.rho;
        } else {
          params["mu"] = p.mu;
        }
      },
      model.params());
  return {{"family", std::string(to_string(model.family()))}, {"params", std::move(params)}};
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw InputError("config must be a JSON object");
  SignalVector truth(numbers(require(doc, "truth"), "truth"));

  const json& dict_doc = require(doc, "dictionary");
  if (!dict_doc.is_array() || dict_doc.empty()) throw InputError("'dictionary' must be a nonempty array of vectors");
  std::vector<SignalVector> atoms;
  for (const auto& atom : dict_doc) atoms.emplace_back(numbers(atom, "dictionary"));
  Dictionary dictionary(std::move(atoms));

  WeightVector prior = WeightVector::uniform(dictionary.size());
  if (doc.contains("prior") && !(doc["prior"].is_string() && doc["prior"] == "uniform")) {
    try {
      prior = WeightVector::from_weights(numbers(doc["prior"], "prior"));
    } catch (const InputError& e) {
      throw InputError(std::string("'prior': ") + e.what());
    }
  }

  NoiseModel noise = noise_from_json(require(doc, "noise"), truth.size());

  const json& beta_doc = require(doc, "beta");
  double beta = 0.0;
  if (beta_doc.is_string() && beta_doc == "inf") {
    beta = kInfiniteBeta;
  } else {
    beta = number(beta_doc, "beta");
  }
  if (!(beta > 0.0)) throw InputError("beta must be positive");

  const std::size_t replicates = positive_integer(require(doc, "replicates"), "replicates");
  const json& seed_doc = require(doc, "seed");
  if (!seed_doc.is_number_unsigned() && !(seed_doc.is_number_integer() && seed_doc.get<long long>() >= 0)) {
    throw InputError("'seed' must be a nonnegative integer");
  }
  std::optional<std::size_t> prior_samples;
  if (doc.contains("prior_samples") && !doc["prior_samples"].is_null()) {
    prior_samples = positive_integer(doc["prior_samples"], "prior_samples");
  }

  ExperimentConfig config{std::move(truth), std::move(dictionary), std::move(prior), std::move(noise), beta,
                          replicates,       seed_doc.get<std::uint64_t>(), prior_samples};
  config.validate();
  return config;
}

json config_to_json(const ExperimentConfig& config) {
  json dictionary = json::array();
  for (const auto& atom : config.dictionary.atoms()) {
    dictionary.push_back(std::vector<double>(atom.values().begin(), atom.values().end()));
  }
  const auto truth = config.truth.values();
  const auto prior = config.prior.weights();
  return {{"truth", std::vector<double>(truth.begin(), truth.end())},
          {"dictionary", std::move(dictionary)},
          {"prior", std::vector<double>(prior.begin(), prior.end())},
          {"noise", noise_to_json(config.noise)},
          {"beta", beta_to_json(config.beta)},
          {"replicates", config.replicates},
          {"seed", config.seed},
          {"prior_samples", config.prior_samples ? json(*config.prior_samples) : json(nullptr)}};
}

}  // namespace ewa_agg
