#pragma once

// Serialization of sequences, reports and traces (JSON with "schema": 1,
// CSV with '.' decimals and LF line endings), plus seeded sample data.

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ulab/evolution.hpp"
#include "ulab/finite.hpp"
#include "ulab/lattice.hpp"

namespace ulab::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Shortest of %.15g, %.16g, %.17g that reads back to the same double;
/// "nan", "inf", "-inf" for non-finite values.
std::string format_number(double x);

/// {"schema":1,"d","N","h","re":[...],"im":[...]} with values in row-major
/// order, first index slowest.
json to_json(const LatticeSeq& u);
/// Inverse of to_json. Throws InvalidArgument on a malformed document.
LatticeSeq sequence_from_json(const json& j);

json to_json(const UncertaintyReport& r);
json to_json(const VirialTrace& tr);

FiniteVariant parse_variant(std::string_view name);  // dft | periodic | dirichlet
std::string_view variant_name(FiniteVariant v);

/// {"schema":1,"variant","N","h","alpha"}.
json to_json(const FiniteCase& c);
FiniteCase finite_case_from_json(const json& j);

/// One CSV record terminated by '\n'. Fields are written verbatim.
void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

/// Header t,F,Fdot,Fddot,fit_residual and one row per sample.
void write_trace_csv(std::ostream& os, const VirialTrace& tr);

/// Independent standard normal real and imaginary parts on [-N, N]^d from a
/// mt19937_64 seeded with seed; identical for identical arguments.
LatticeSeq random_sequence(std::uint64_t seed, int d, int N, double h);

/// steps+1 equally spaced times from t0 to t1 (steps >= 1).
std::vector<double> time_grid(double t0, double t1, int steps);

}  // namespace ulab::io
