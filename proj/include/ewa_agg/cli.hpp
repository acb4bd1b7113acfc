#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ewa_agg::cli {

enum class Subcommand { simulate, certify, verify_coupling, verify_bernstein, dv_check, oracle_bound };
enum class Format { csv, json };

std::string_view to_string(Subcommand sub);
std::optional<Subcommand> parse_subcommand(std::string_view name);

struct CliCommand {
  Subcommand subcommand = Subcommand::simulate;
  std::string config_path;
  std::optional<std::string> output_path;  // stdout when absent
  std::optional<std::uint64_t> seed_override;
  Format format = Format::csv;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitInputError = 2;

/// Report table rendered as CSV (header always present, 17 significant
/// digits) or as a JSON array of row objects.
struct Table {
  using Cell = std::variant<std::string, double, std::int64_t, std::uint64_t>;
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
};

std::string format_double(double x);

/// Executes one command. Reports go to command.output_path or `out`;
/// diagnostics go to `err`. Returns 0 when every verdict passes, 1 when any
/// fails (the report is still written), 2 on input errors.
int run(const CliCommand& command, std::ostream& out, std::ostream& err);

}  // namespace ewa_agg::cli
