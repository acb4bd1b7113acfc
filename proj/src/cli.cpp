#include "ewa_agg/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "ewa_agg/bernstein.hpp"
#include "ewa_agg/config.hpp"
#include "ewa_agg/coupling.hpp"
#include "ewa_agg/ewa.hpp"
#include "ewa_agg/oracle.hpp"
#include "ewa_agg/rng.hpp"

namespace ewa_agg::cli {
namespace {

using nlohmann::json;

constexpr std::size_t kDefaultSampleSize = 1'000'000;
constexpr std::size_t kDefaultTrials = 100;

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string verdict(bool passed) { return passed ? "pass" : "fail"; }

std::vector<double> alpha_grid(const json& doc) {
  if (!doc.contains("alpha_grid")) return {0.1, 0.25, 0.5, 1.0};
  const json& grid = doc["alpha_grid"];
  if (!grid.is_array() || grid.empty()) throw InputError("'alpha_grid' must be a nonempty array of numbers");
  std::vector<double> out;
  for (const auto& a : grid) {
    if (!a.is_number()) throw InputError("'alpha_grid' must be a nonempty array of numbers");
    const double alpha = a.get<double>();
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("'alpha_grid' entries must lie in (0,1]");
    out.push_back(alpha);
  }
  return out;
}

std::size_t positive_extension(const json& doc, const char* key, std::size_t fallback) {
  if (!doc.contains(key)) return fallback;
  const json& v = doc[key];
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw InputError(std::string("'") + key + "' must be a positive integer");
  }
  return v.get<std::size_t>();
}

std::optional<SupportDiameter> domain_diameter(const json& doc) {
  if (!doc.contains("domain_diameter")) return std::nullopt;
  const json& v = doc["domain_diameter"];
  if (!v.is_number() || v.get<double>() < 0.0) throw InputError("'domain_diameter' must be a nonnegative number");
  return SupportDiameter{v.get<double>()};
}

const std::vector<std::string> kRiskHeader = {"family", "n",  "m",       "beta",    "threshold", "mode", "risk",
                                              "stderr", "bound", "penalty", "slack", "verdict",   "R",    "seed"};

std::vector<Table::Cell> risk_row(const RiskReport& r) {
  return {std::string(to_string(r.family)),
          static_cast<std::uint64_t>(r.n),
          static_cast<std::uint64_t>(r.m),
          r.beta,
          r.threshold,
          std::string(to_string(r.mode)),
          r.risk_estimate,
          r.verdict_stderr,
          r.oracle_bound,
          r.penalty_term,
          r.slack,
          verdict(r.passed),
          static_cast<std::uint64_t>(r.replicates),
          r.seed};
}

struct Outcome {
  Table table;
  bool passed = true;
};

Outcome simulate(const ExperimentConfig& config, const json& doc, std::ostream& err) {
  RiskMode mode = RiskMode::clean;
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) throw InputError("'mode' must be a string");
    mode = parse_risk_mode(doc["mode"].get<std::string>());
  }
  const RiskReport report = mc_risk(config, mode, domain_diameter(doc));
  if (report.below_threshold) {
    err << "warning: beta " << format_double(report.beta) << " is below the clean-mode threshold "
        << format_double(report.threshold) << "\n";
  }
  return {{kRiskHeader, {risk_row(report)}}, report.passed};
}

Outcome certify(const ExperimentConfig& config, const json& doc) {
  const Certification c = certify_corollary(config, domain_diameter(doc));
  Outcome out{{kRiskHeader, {risk_row(c.at_threshold)}}, c.at_threshold.passed};
  if (doc.value("include_penalty", false)) {
    out.table.rows.push_back(risk_row(c.below_threshold));
    out.passed = out.passed && c.below_threshold.passed;
  }
  return out;
}

Outcome verify_coupling_cmd(const ExperimentConfig& config, const json& doc) {
  const Family family = config.noise.family();
  const bool discrete = family != Family::gaussian && family != Family::laplace;
  CouplingMethod method = discrete ? CouplingMethod::exact : CouplingMethod::ks;
  if (doc.contains("method")) {
    if (!doc["method"].is_string()) throw InputError("'method' must be a string");
    method = parse_coupling_method(doc["method"].get<std::string>());
  }
  const std::size_t sample_size = positive_extension(doc, "sample_size", kDefaultSampleSize);
  Outcome out{{{"family", "alpha", "method", "statistic", "threshold", "verdict", "seed"}, {}}, true};
  const auto grid = alpha_grid(doc);
  for (std::size_t a = 0; a < grid.size(); ++a) {
    Rng rng = derive_stream(config.seed, a);
    const CouplingReport r = verify_coupling(config.noise, grid[a], method, sample_size, rng);
    out.table.rows.push_back({std::string(to_string(r.family)), r.alpha, std::string(to_string(r.method)),
                              r.statistic, r.threshold, verdict(r.passed), config.seed});
    out.passed = out.passed && r.passed;
  }
  return out;
}

Outcome verify_bernstein_cmd(const ExperimentConfig& config, const json& doc) {
  const std::size_t points = positive_extension(doc, "t_grid_points", kCfGridPoints);
  if (points < 2) throw InputError("'t_grid_points' must be at least 2");
  const std::size_t sample_size = positive_extension(doc, "sample_size", kDefaultSampleSize);
  const BernsteinProfile profile = profile_for(config.noise);
  Outcome out{{{"family", "alpha", "v", "b", "c", "t_points", "max_ratio", "verdict", "seed"}, {}}, true};
  const auto grid = alpha_grid(doc);
  for (std::size_t a = 0; a < grid.size(); ++a) {
    Rng rng = derive_stream(config.seed, a);
    const MgfReport r = verify_bernstein(config.noise, grid[a], points, sample_size, rng);
    out.table.rows.push_back({std::string(to_string(profile.family)), grid[a], profile.v(grid[a]), profile.b(grid[a]),
                              profile.mgf_normalization, static_cast<std::uint64_t>(r.points), r.max_ratio,
                              verdict(r.passed), config.seed});
    out.passed = out.passed && r.passed;
  }
  return out;
}

Outcome dv_check_cmd(const ExperimentConfig& config, const json& doc) {
  const std::size_t trials = positive_extension(doc, "trials", kDefaultTrials);
  Rng noise_rng = derive_stream(config.seed, 0);
  const SignalVector y = config.truth + sample_noise(config.noise, noise_rng);
  Rng rng = derive_stream(config.seed, 1);
  const DvReport r = dv_minimality_test(y, config.dictionary, config.prior, config.beta, trials, rng);
  return {{{"n", "m", "beta", "trials", "worst_violation", "verdict", "seed"},
           {{static_cast<std::uint64_t>(config.truth.size()), static_cast<std::uint64_t>(config.dictionary.size()),
             config.beta, static_cast<std::uint64_t>(r.trials), r.worst_violation, verdict(r.passed), config.seed}}},
          r.passed};
}

Outcome oracle_bound_cmd(const ExperimentConfig& config) {
  const double finite = oracle_bound_finite(config.dictionary, config.truth, config.prior, config.beta);
  const double gibbs = oracle_bound_gibbs(config.dictionary, config.truth, config.prior, config.beta);
  return {{{"n", "m", "beta", "finite_bound", "gibbs_bound", "seed"},
           {{static_cast<std::uint64_t>(config.truth.size()), static_cast<std::uint64_t>(config.dictionary.size()),
             config.beta, finite, gibbs, config.seed}}},
          true};
}

json cell_to_json(const Table::Cell& cell) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return format_double(v);
        }
        return v;
      },
      cell);
}

}  // namespace

std::string_view to_string(Subcommand sub) {
  switch (sub) {
    case Subcommand::simulate: return "simulate";
    case Subcommand::certify: return "certify";
    case Subcommand::verify_coupling: return "verify-coupling";
    case Subcommand::verify_bernstein: return "verify-bernstein";
    case Subcommand::dv_check: return "dv-check";
    case Subcommand::oracle_bound: return "oracle-bound";
  }
  return "unknown";
}

std::optional<Subcommand> parse_subcommand(std::string_view name) {
  for (Subcommand s : {Subcommand::simulate, Subcommand::certify, Subcommand::verify_coupling,
                       Subcommand::verify_bernstein, Subcommand::dv_check, Subcommand::oracle_bound}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void Table::write_csv(std::ostream& out) const {
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << csv_escape(header[c]);
  out << "\r\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) {
              out << csv_escape(v);
            } else if constexpr (std::is_same_v<T, double>) {
              out << format_double(v);
            } else {
              out << v;
            }
          },
          row[c]);
    }
    out << "\r\n";
  }
}

void Table::write_json(std::ostream& out) const {
  json doc = json::array();
  for (const auto& row : rows) {
    json obj = json::object();
    for (std::size_t c = 0; c < header.size() && c < row.size(); ++c) obj[header[c]] = cell_to_json(row[c]);
    doc.push_back(std::move(obj));
  }
  out << doc.dump(2) << "\n";
}

int run(const CliCommand& command, std::ostream& out, std::ostream& err) {
  Outcome outcome;
  try {
    std::ifstream in(command.config_path);
    if (!in) throw InputError("cannot open config file '" + command.config_path + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw InputError(std::string("config is not valid JSON: ") + e.what());
    }
    if (command.seed_override && doc.is_object()) doc["seed"] = *command.seed_override;
    const ExperimentConfig config = config_from_json(doc);

    switch (command.subcommand) {
      case Subcommand::simulate: outcome = simulate(config, doc, err); break;
      case Subcommand::certify: outcome = certify(config, doc); break;
      case Subcommand::verify_coupling: outcome = verify_coupling_cmd(config, doc); break;
      case Subcommand::verify_bernstein: outcome = verify_bernstein_cmd(config, doc); break;
      case Subcommand::dv_check: outcome = dv_check_cmd(config, doc); break;
      case Subcommand::oracle_bound: outcome = oracle_bound_cmd(config); break;
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  std::ostringstream rendered;
  if (command.format == Format::csv) {
    outcome.table.write_csv(rendered);
  } else {
    outcome.table.write_json(rendered);
  }
  if (command.output_path) {
    std::ofstream file(*command.output_path, std::ios::binary);
    if (!file) {
      err << "error: cannot write output file '" << *command.output_path << "'\n";
      return kExitInputError;
    }
    file << rendered.str();
  } else {
    out << rendered.str();
  }
  return outcome.passed ? kExitPass : kExitFail;
}

}  // namespace ewa_agg::cli
