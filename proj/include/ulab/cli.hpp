#pragma once

// Command-line front end. Every subcommand takes a flat key-value parameter
// map, validates it against its schema and writes one artifact (CSV or JSON)
// to the output path or to `out`, with a short summary on `log`.

#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

namespace ulab::cli {

enum class Subcommand { Verify, Minimizer, Evolve, Virial, Finite, Converge };

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumeric = 3;

struct RunConfig {
  Subcommand subcommand = Subcommand::Verify;
  std::map<std::string, std::string> params;  // flags are stored as "true"
};

struct ParamSpec {
  std::string_view name;
  std::string_view help;
  bool flag = false;
};

std::span<const Subcommand> subcommands();
std::string_view subcommand_name(Subcommand s);
std::string_view subcommand_help(Subcommand s);
/// Throws InvalidArgument for an unknown name.
Subcommand parse_subcommand(std::string_view name);
/// Accepted parameters of a subcommand, in help order.
std::span<const ParamSpec> parameters(Subcommand s);

/// Worker threads for parameter sweeps: hardware concurrency, capped by a
/// positive integer in UNCERTAINTY_LAB_THREADS.
std::size_t worker_count();

/// Runs one subcommand. Returns kExitOk, kExitInvalid (bad parameters or
/// domain errors) or kExitNumeric (numerical failure); errors are reported on
/// `log`, never thrown.
int run(const RunConfig& config, std::ostream& out, std::ostream& log);

}  // namespace ulab::cli
