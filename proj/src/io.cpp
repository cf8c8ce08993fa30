#include "ulab/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>

#include "ulab/errors.hpp"

namespace ulab::io {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // also -0
  // printf uses '.' as long as LC_NUMERIC stays "C", which nothing here changes.
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

json to_json(const LatticeSeq& u) {
  json re = json::array(), im = json::array();
  for (const cplx& v : u.values()) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  return json{{"schema", kSchemaVersion}, {"d", u.dim()}, {"N", u.radius()}, {"h", u.mesh()},
              {"re", std::move(re)}, {"im", std::move(im)}};
}

LatticeSeq sequence_from_json(const json& j) {
  try {
    if (j.value("schema", kSchemaVersion) != kSchemaVersion) throw InvalidArgument("sequence JSON: unsupported schema");
    const int d = j.at("d").get<int>();
    const int N = j.at("N").get<int>();
    const double h = j.at("h").get<double>();
    LatticeSeq u(d, N, h);
    const auto& re = j.at("re");
    const auto im = j.contains("im") ? j.at("im") : json::array();
    if (!re.is_array() || re.size() != u.size() || (!im.empty() && im.size() != u.size()))
      throw InvalidArgument("sequence JSON: re/im must hold (2N+1)^d values");
    auto vals = u.values();
    for (std::size_t i = 0; i < u.size(); ++i)
      vals[i] = {re[i].get<double>(), im.empty() ? 0.0 : im[i].get<double>()};
    for (const cplx& v : vals)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InvalidArgument("sequence JSON: non-finite value");
    return u;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("sequence JSON: ") + e.what());
  }
}

json to_json(const UncertaintyReport& r) {
  return json{{"lhs", r.lhs},         {"pos_factor", r.pos_factor}, {"mom_factor", r.mom_factor},
              {"ratio", r.ratio},     {"equality", r.equality},     {"degenerate", r.degenerate}};
}

json to_json(const VirialTrace& tr) {
  json samples = json::array();
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    samples.push_back(json{{"t", tr.times[i]}, {"F", tr.F[i]}, {"Fdot", tr.Fdot[i]}, {"Fddot", tr.Fddot[i]},
                           {"fit_residual", tr.fit_residual[i]}});
  return json{{"schema", kSchemaVersion},
              {"a_fit", tr.a_fit},
              {"b_fit", tr.b_fit},
              {"a_initial", tr.a_initial},
              {"ab_fit", fit_product(tr)},
              {"ab_initial", initial_product(tr)},
              {"curvature", tr.curvature},
              {"residual", tr.residual},
              {"third_derivative_max", tr.third_derivative_max},
              {"time_shift", tr.time_shift},
              {"scale", tr.scale},
              {"norm_drift", tr.norm_drift},
              {"hypothesis_residual", tr.hypothesis_residual},
              {"samples", std::move(samples)}};
}

FiniteVariant parse_variant(std::string_view name) {
  if (name == "dft") return FiniteVariant::DFT;
  if (name == "periodic") return FiniteVariant::Periodic;
  if (name == "dirichlet") return FiniteVariant::Dirichlet;
  throw InvalidArgument("unknown finite variant '" + std::string(name) + "' (dft, periodic, dirichlet)");
}

std::string_view variant_name(FiniteVariant v) {
  switch (v) {
    case FiniteVariant::DFT: return "dft";
    case FiniteVariant::Periodic: return "periodic";
    case FiniteVariant::Dirichlet: return "dirichlet";
  }
  return "?";
}

json to_json(const FiniteCase& c) {
  return json{{"schema", kSchemaVersion}, {"variant", variant_name(c.variant)}, {"N", c.N}, {"h", c.h}, {"alpha", c.alpha}};
}

FiniteCase finite_case_from_json(const json& j) {
  try {
    if (j.value("schema", kSchemaVersion) != kSchemaVersion) throw InvalidArgument("case JSON: unsupported schema");
    return build_case(parse_variant(j.at("variant").get<std::string>()), j.at("N").get<int>(), j.value("h", 1.0),
                      j.value("alpha", 1.0));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("case JSON: ") + e.what());
  }
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << fields[i];
  }
  os << '\n';
}

void write_trace_csv(std::ostream& os, const VirialTrace& tr) {
  write_csv_row(os, {"t", "F", "Fdot", "Fddot", "fit_residual"});
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    write_csv_row(os, {format_number(tr.times[i]), format_number(tr.F[i]), format_number(tr.Fdot[i]),
                       format_number(tr.Fddot[i]), format_number(tr.fit_residual[i])});
}

LatticeSeq random_sequence(std::uint64_t seed, int d, int N, double h) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  LatticeSeq u(d, N, h);
  for (cplx& v : u.values()) {
    const double re = g(rng);
    v = {re, g(rng)};
  }
  return u;
}

std::vector<double> time_grid(double t0, double t1, int steps) {
  if (steps < 1) throw InvalidArgument("time grid: steps must be >= 1");
  if (!std::isfinite(t0) || !std::isfinite(t1)) throw InvalidArgument("time grid: non-finite end point");
  std::vector<double> t(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) t[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / steps;
  t.back() = t1;
  return t;
}

}  // namespace ulab::io
