#include "ulab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "ulab/errors.hpp"
#include "ulab/evolution.hpp"
#include "ulab/finite.hpp"
#include "ulab/io.hpp"
#include "ulab/lattice.hpp"
#include "ulab/minimizer.hpp"

namespace ulab::cli {
namespace {

using io::json;

class ParamError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

constexpr Subcommand kSubcommands[] = {Subcommand::Verify, Subcommand::Evolve, Subcommand::Minimizer,
                                       Subcommand::Virial, Subcommand::Finite, Subcommand::Converge};

constexpr ParamSpec kOutput[] = {
    {"format", "csv or json (default csv; json for verify)"},
    {"output", "write the artifact to this path instead of stdout"},
};

constexpr ParamSpec kVerify[] = {
    {"inequality", "main or second (default main)"},
    {"input", "JSON file with one sequence or an array of sequences"},
    {"random", "use seeded random sequences", true},
    {"seed", "random seed (default 1)"},
    {"count", "number of random sequences (default 1)"},
    {"d", "dimension of random sequences (default 1)"},
    {"N", "box radius of random sequences (default 4)"},
    {"h", "mesh of random sequences (default 1)"},
    kOutput[0],
    kOutput[1],
};

constexpr ParamSpec kMinimizer[] = {
    {"relation", "main or second (default main)"},
    {"alpha", "alpha > 0 (default 1)"},
    {"h", "mesh h > 0 (default 1)"},
    {"d", "dimension 1..3 (default 1; second relation needs 1)"},
    {"norm", "center, unit or commutator2 (default center)"},
    {"N", "box radius (default: smallest radius with tail < 1e-13)"},
    kOutput[0],
    kOutput[1],
};

constexpr ParamSpec kEvolve[] = {
    {"init", "minimizer, random or file (default minimizer)"},
    {"input", "JSON sequence file for init=file"},
    {"method", "spectral, kernel or closed (default spectral; closed needs init=minimizer)"},
    {"alpha", "minimizer alpha (default 1)"},
    {"h", "mesh (default 1)"},
    {"d", "dimension (default 1)"},
    {"norm", "minimizer normalization (default center)"},
    {"N", "box radius of the initial datum"},
    {"seed", "random seed (default 1)"},
    {"t0", "first time (default 0)"},
    {"t1", "last time (default 1)"},
    {"steps", "number of time intervals (default 4)"},
    {"window", "radius of the dumped box (default: radius of the datum)"},
    kOutput[0],
    kOutput[1],
};

constexpr ParamSpec kVirial[] = {
    {"system", "schrodinger, coupled-conjugate or coupled-alternating (default schrodinger)"},
    {"init", "minimizer, random or file (default minimizer)"},
    {"input", "JSON sequence file for init=file"},
    {"alpha", "minimizer alpha (default 1)"},
    {"h", "mesh (default 1)"},
    {"d", "dimension (default 1)"},
    {"N", "box radius of random data (default 4)"},
    {"seed", "random seed (default 1)"},
    {"t1", "largest sample time (default 2)"},
    {"steps", "number of time intervals (default 8)"},
    kOutput[0],
    kOutput[1],
};

constexpr ParamSpec kFinite[] = {
    {"mode", "virial or minimizer (default virial)"},
    {"variant", "dft, periodic or dirichlet"},
    {"N", "indices -N..N"},
    {"h", "mesh (default 1)"},
    {"alpha", "alpha > 0 (default 1)"},
    {"u0", "comma-separated initial datum of length 2N+1 (default: the counterexample table)"},
    {"t", "evaluation time (default 0)"},
    kOutput[0],
    kOutput[1],
};

constexpr ParamSpec kConverge[] = {
    {"kind", "gaussian, profile or both (default both)"},
    {"j", "comma-separated resolutions (default 8,16,32,64 / 16,32,64)"},
    {"x", "comma-separated points (default 0,0.25,...,3 / 0.5,1,2)"},
    {"d", "dimension of the Gaussian points (x,...,x) (default 1)"},
    {"L", "half period of the profile (default pi)"},
    {"plot-dir", "directory for two-column x/value data files"},
    kOutput[0],
    kOutput[1],
};

// ---------------------------------------------------------------- parameters

class Params {
 public:
  Params(const RunConfig& cfg) : cfg_(cfg) {
    const auto spec = parameters(cfg.subcommand);
    for (const auto& [key, value] : cfg.params) {
      const bool known = std::any_of(spec.begin(), spec.end(), [&](const ParamSpec& p) { return p.name == key; });
      if (!known)
        throw ParamError("unknown parameter '" + key + "' for " + std::string(subcommand_name(cfg.subcommand)));
    }
  }

  bool has(const std::string& key) const { return cfg_.params.count(key) > 0; }

  std::string text(const std::string& key, const std::string& fallback) const {
    const auto it = cfg_.params.find(key);
    return it == cfg_.params.end() ? fallback : it->second;
  }

  std::string choice(const std::string& key, std::initializer_list<std::string_view> allowed) const {
    const std::string v = text(key, std::string(*allowed.begin()));
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      std::string msg = "parameter '" + key + "' must be one of";
      for (auto a : allowed) msg += " " + std::string(a);
      throw ParamError(msg);
    }
    return v;
  }

  bool flag(const std::string& key) const {
    const std::string v = text(key, "false");
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ParamError("parameter '" + key + "' is a flag");
  }

  double real(const std::string& key, double fallback) const {
    return has(key) ? parse_real(key, text(key, "")) : fallback;
  }

  long integer(const std::string& key, long fallback, long lo, long hi) const {
    if (!has(key)) return fallback;
    const std::string s = text(key, "");
    long v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw ParamError("parameter '" + key + "' must be an integer");
    if (v < lo || v > hi)
      throw ParamError("parameter '" + key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }

  std::vector<double> reals(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    std::stringstream ss(text(key, ""));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item));
    if (out.empty()) throw ParamError("parameter '" + key + "' needs at least one value");
    return out;
  }

  std::vector<int> ints(const std::string& key, std::vector<int> fallback, int lo, int hi) const {
    if (!has(key)) return fallback;
    std::vector<int> out;
    for (double v : reals(key, {})) {
      if (v != std::floor(v) || v < lo || v > hi)
        throw ParamError("parameter '" + key + "' needs integers in [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
      out.push_back(static_cast<int>(v));
    }
    return out;
  }

 private:
  static double parse_real(const std::string& key, const std::string& s) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (s.empty() || end != begin + s.size() || !std::isfinite(v))
      throw ParamError("parameter '" + key + "' must be a finite number, got '" + s + "'");
    return v;
  }

  const RunConfig& cfg_;
};

NormMode parse_norm(const Params& p) {
  const std::string n = p.choice("norm", {"center", "unit", "commutator2"});
  if (n == "unit") return NormMode::UnitL2;
  if (n == "commutator2") return NormMode::Commutator2;
  return NormMode::CenterOne;
}

MinimizerSpec minimizer_spec(const Params& p) {
  MinimizerSpec s;
  s.alpha = p.real("alpha", 1.0);
  s.h = p.real("h", 1.0);
  s.d = static_cast<int>(p.integer("d", 1, 1, 3));
  s.norm = p.has("norm") ? parse_norm(p) : NormMode::CenterOne;
  validate(s);
  return s;
}

void check_box(int d, long N) {
  double sites = 1.0;
  for (int i = 0; i < d; ++i) sites *= 2.0 * N + 1.0;
  if (sites > 2e7) throw ParamError("box [-N, N]^d is too large");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParamError("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParamError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::vector<LatticeSeq> read_sequences(const std::string& path) {
  const json doc = read_json_file(path);
  std::vector<LatticeSeq> out;
  if (doc.is_array())
    for (const auto& item : doc) out.push_back(io::sequence_from_json(item));
  else
    out.push_back(io::sequence_from_json(doc));
  if (out.empty()) throw ParamError("'" + path + "' holds no sequences");
  return out;
}

LatticeSeq resize(const LatticeSeq& u, int R) { return R >= u.radius() ? u.padded(R) : u.cropped(R); }

// ---------------------------------------------------------------- parallel map

template <class F>
auto parallel_map(std::size_t n, F&& f) -> std::vector<decltype(f(std::size_t{0}))> {
  using T = decltype(f(std::size_t{0}));
  std::vector<std::optional<T>> slots(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  const std::size_t threads = std::min(worker_count(), n);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------- artifacts

struct Artifact {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  json summary = json::object();
  json extra = json::object();  // JSON output only
};

std::string cell_text(const json& v) {
  if (v.is_number()) return io::format_number(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void write_artifact(const Artifact& a, Subcommand s, const Params& p, std::ostream& out, std::ostream& log) {
  // verify reports are JSON documents unless CSV is requested.
  const std::string format = s == Subcommand::Verify ? p.choice("format", {"json", "csv"}) : p.choice("format", {"csv", "json"});
  std::ofstream file;
  std::ostream* os = &out;
  if (p.has("output")) {
    file.open(p.text("output", ""), std::ios::binary | std::ios::trunc);
    if (!file) throw ParamError("cannot write '" + p.text("output", "") + "'");
    os = &file;
  }
  if (format == "csv") {
    io::write_csv_row(*os, a.columns);
    for (const auto& row : a.rows) {
      std::vector<std::string> cells;
      for (const auto& v : row) cells.push_back(cell_text(v));
      io::write_csv_row(*os, cells);
    }
  } else {
    json doc{{"schema", io::kSchemaVersion}, {"subcommand", subcommand_name(s)}, {"summary", a.summary}};
    for (const auto& [k, v] : a.extra.items()) doc[k] = v;
    json rows = json::array();
    for (const auto& row : a.rows) {
      json obj = json::object();
      for (std::size_t i = 0; i < a.columns.size(); ++i) obj[a.columns[i]] = row[i];
      rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    *os << doc.dump(2) << '\n';
  }
  os->flush();
  if (!*os) throw NumericalError("failed while writing the artifact");
  for (const auto& [k, v] : a.summary.items()) log << k << '=' << cell_text(v) << '\n';
}

std::vector<std::string> index_columns(int d) {
  std::vector<std::string> c;
  for (int j = 1; j <= d; ++j) c.push_back("k" + std::to_string(j));
  return c;
}

void append_sites(std::vector<std::vector<json>>& rows, const LatticeSeq& u, std::vector<json> prefix) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Index k = u.index_of(i);
    auto row = prefix;
    for (int j = 0; j < u.dim(); ++j) row.push_back(k[j]);
    row.push_back(u.values()[i].real());
    row.push_back(u.values()[i].imag());
    rows.push_back(std::move(row));
  }
}

// ---------------------------------------------------------------- subcommands

Artifact do_verify(const Params& p) {
  const std::string inequality = p.choice("inequality", {"main", "second"});
  std::vector<LatticeSeq> seqs;
  if (p.has("input")) {
    if (p.flag("random")) throw ParamError("use either input or random, not both");
    seqs = read_sequences(p.text("input", ""));
  } else if (p.flag("random")) {
    const long count = p.integer("count", 1, 1, 1000000);
    const auto seed = static_cast<std::uint64_t>(p.integer("seed", 1, 0, std::numeric_limits<long>::max()));
    const int d = static_cast<int>(p.integer("d", 1, 1, 3));
    const long N = p.integer("N", 4, 0, 100000);
    check_box(d, N);
    const double h = p.real("h", 1.0);
    seqs = parallel_map(static_cast<std::size_t>(count),
                        [&](std::size_t i) { return io::random_sequence(seed + i, d, static_cast<int>(N), h); });
  } else {
    throw ParamError("verify needs input or random");
  }
  const auto reports = parallel_map(seqs.size(), [&](std::size_t i) {
    return inequality == "main" ? uncertainty_main(seqs[i]) : uncertainty_second(seqs[i]);
  });
  Artifact a;
  a.columns = {"index", "lhs", "pos_factor", "mom_factor", "ratio", "equality", "degenerate"};
  double max_ratio = 0.0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    a.rows.push_back({i, r.lhs, r.pos_factor, r.mom_factor, r.ratio, r.equality, r.degenerate});
    max_ratio = std::max(max_ratio, r.ratio);
  }
  a.summary = {{"inequality", inequality}, {"count", reports.size()}, {"max_ratio", max_ratio}};
  return a;
}

Artifact do_minimizer(const Params& p) {
  const std::string relation = p.choice("relation", {"main", "second"});
  const MinimizerSpec spec = minimizer_spec(p);
  const bool main = relation == "main";
  const int fallback = main ? recommended_radius(spec) : recommended_radius_second(spec);
  const int N = static_cast<int>(p.integer("N", fallback, 1, 100000));
  check_box(spec.d, N);
  const LatticeSeq w = main ? minimizer_main(spec, N) : minimizer_second(spec, N);
  const UncertaintyReport r = main ? uncertainty_main(w) : uncertainty_second(w);
  const double residual = main ? main_recurrence_residual(w, spec.alpha) : second_recurrence_residual(w, spec.alpha);
  Artifact a;
  a.columns = index_columns(spec.d);
  a.columns.insert(a.columns.end(), {"re", "im"});
  append_sites(a.rows, w, {});
  a.summary = {{"relation", relation}, {"N", N},         {"ratio", r.ratio},
               {"equality", r.equality}, {"recurrence_residual", residual}};
  a.extra = {{"sequence", io::to_json(w)}, {"report", io::to_json(r)}};
  return a;
}

Artifact do_evolve(const Params& p) {
  const std::string init = p.choice("init", {"minimizer", "random", "file"});
  const std::string method = p.choice("method", {"spectral", "kernel", "closed"});
  const auto times = io::time_grid(p.real("t0", 0.0), p.real("t1", 1.0), static_cast<int>(p.integer("steps", 4, 1, 10000)));
  std::optional<MinimizerSpec> spec;
  LatticeSeq u0(1, 0, 1.0);
  if (init == "minimizer") {
    spec = minimizer_spec(p);
    const int N = static_cast<int>(p.integer("N", recommended_radius(*spec), 1, 100000));
    check_box(spec->d, N);
    u0 = minimizer_main(*spec, N);
  } else if (init == "random") {
    const int d = static_cast<int>(p.integer("d", 1, 1, 3));
    const long N = p.integer("N", 4, 0, 100000);
    check_box(d, N);
    u0 = io::random_sequence(static_cast<std::uint64_t>(p.integer("seed", 1, 0, std::numeric_limits<long>::max())), d,
                             static_cast<int>(N), p.real("h", 1.0));
  } else {
    if (!p.has("input")) throw ParamError("init=file needs input");
    u0 = read_sequences(p.text("input", "")).front();
  }
  if (method == "closed" && !spec) throw ParamError("method=closed needs init=minimizer");
  const int window = static_cast<int>(p.integer("window", u0.radius(), 0, 100000));
  check_box(u0.dim(), window);

  const auto states = parallel_map(times.size(), [&](std::size_t i) {
    const double t = times[i];
    if (method == "closed") return minimizer_evolution(*spec, t, window);
    return resize(method == "spectral" ? evolve_schrodinger(u0, t) : evolve_schrodinger_kernel(u0, t), window);
  });
  Artifact a;
  a.columns = {"t"};
  for (const auto& c : index_columns(u0.dim())) a.columns.push_back(c);
  a.columns.insert(a.columns.end(), {"re", "im"});
  json samples = json::array();
  for (std::size_t i = 0; i < times.size(); ++i) {
    append_sites(a.rows, states[i], {times[i]});
    samples.push_back(json{{"t", times[i]}, {"sequence", io::to_json(states[i])}});
  }
  a.summary = {{"init", init}, {"method", method}, {"samples", times.size()}, {"window", window}};
  a.extra = {{"initial", io::to_json(u0)}, {"samples", std::move(samples)}};
  return a;
}

Artifact do_virial(const Params& p) {
  const std::string system = p.choice("system", {"schrodinger", "coupled-conjugate", "coupled-alternating"});
  const std::string init = p.choice("init", {"minimizer", "random", "file"});
  const auto times = io::time_grid(0.0, p.real("t1", 2.0), static_cast<int>(p.integer("steps", 8, 1, 10000)));
  const bool coupled = system != "schrodinger";
  LatticeSeq u0(1, 0, 1.0);
  if (init == "minimizer") {
    MinimizerSpec spec = minimizer_spec(p);
    spec.norm = NormMode::Commutator2;
    if (coupled && spec.d != 1) throw UnsupportedDimension("the coupled system is one-dimensional");
    u0 = coupled ? minimizer_second(spec, recommended_radius_second(spec)) : minimizer_main(spec, recommended_radius(spec));
  } else if (init == "random") {
    const int d = static_cast<int>(p.integer("d", 1, 1, 3));
    const long N = p.integer("N", 4, 0, 100000);
    check_box(d, N);
    u0 = io::random_sequence(static_cast<std::uint64_t>(p.integer("seed", 1, 0, std::numeric_limits<long>::max())), d,
                             static_cast<int>(N), p.real("h", 1.0));
  } else {
    if (!p.has("input")) throw ParamError("init=file needs input");
    u0 = read_sequences(p.text("input", "")).front();
  }
  const VirialTrace tr =
      !coupled ? virial_trace_schrodinger(u0, times)
               : virial_trace_coupled(u0, system == "coupled-conjugate" ? CoupledVariant::Conjugate : CoupledVariant::Alternating,
                                      times);
  Artifact a;
  a.columns = {"t", "F", "Fdot", "Fddot", "fit_residual"};
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    a.rows.push_back({tr.times[i], tr.F[i], tr.Fdot[i], tr.Fddot[i], tr.fit_residual[i]});
  a.summary = {{"system", system},
               {"a_fit", tr.a_fit},
               {"b_fit", tr.b_fit},
               {"ab_fit", fit_product(tr)},
               {"a_initial", tr.a_initial},
               {"ab_initial", initial_product(tr)},
               {"residual", tr.residual},
               {"third_derivative_max", tr.third_derivative_max},
               {"time_shift", tr.time_shift},
               {"scale", tr.scale},
               {"norm_drift", tr.norm_drift}};
  if (coupled) a.summary["hypothesis_residual"] = tr.hypothesis_residual;
  return a;
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ";" : "") + io::format_number(xs[i]);
  return s;
}

Artifact do_finite(const Params& p) {
  const std::string mode = p.choice("mode", {"virial", "minimizer"});
  const double h = p.real("h", 1.0), alpha = p.real("alpha", 1.0);
  Artifact a;
  if (mode == "minimizer") {
    if (p.has("u0") || p.has("t")) throw ParamError("u0 and t apply to mode=virial");
    const FiniteVariant variant = io::parse_variant(p.text("variant", "dft"));
    const auto c = build_case(variant, static_cast<int>(p.integer("N", 20, 2, 2000)), h, alpha);
    const auto lin = solve_minimizer(c, MinimizerMethod::LinearSolve);
    std::optional<FiniteMinimizer> cf;
    if (variant != FiniteVariant::Periodic) cf = solve_minimizer(c, MinimizerMethod::ContinuedFraction);
    a.columns = {"k", "linear_solve", "continued_fraction"};
    for (int k = -c.N; k <= c.N; ++k)
      a.rows.push_back({k, lin.values(k + c.N), cf ? json(cf->values(k + c.N)) : json(nullptr)});
    const auto r = uncertainty_finite(c, lin.values.cast<std::complex<double>>());
    a.summary = {{"variant", io::variant_name(variant)}, {"N", c.N},        {"ratio", r.ratio},
                 {"equality", r.equality},               {"residual_linear_solve", minimizer_residual(lin)}};
    if (cf) a.summary["residual_continued_fraction"] = minimizer_residual(*cf);
    a.extra = {{"case", io::to_json(c)}};
    return a;
  }

  const double t = p.real("t", 0.0);
  std::vector<FiniteCounterexample> cases;
  if (p.has("u0")) {
    const auto u0 = p.reals("u0", {});
    if (u0.size() % 2 == 0) throw ParamError("u0 must have odd length 2N+1");
    const int N = static_cast<int>((u0.size() - 1) / 2);
    if (p.has("N") && p.integer("N", N, 0, 100000) != N) throw ParamError("u0 length does not match N");
    if (!p.has("variant")) throw ParamError("u0 needs variant");
    cases.push_back({io::parse_variant(p.text("variant", "")), N, u0, std::nan("")});
  } else {
    if (p.has("variant") || p.has("N")) throw ParamError("variant and N need u0 in mode=virial");
    cases = finite_counterexamples();
  }
  a.columns = {"variant", "N", "u0", "t", "F", "Fdot", "Fddot", "Fdddot"};
  for (const auto& ce : cases) {
    const auto c = build_case(ce.variant, ce.N, h, alpha);
    Eigen::VectorXcd u(c.size());
    for (int i = 0; i < c.size(); ++i) u(i) = ce.u0[static_cast<std::size_t>(i)];
    const auto v = finite_virial(c, u, t);
    a.rows.push_back({std::string(io::variant_name(ce.variant)), ce.N, join(ce.u0), t, v.F, v.Fdot, v.Fddot, v.Fdddot});
  }
  a.summary = {{"rows", a.rows.size()}, {"t", t}};
  return a;
}

Artifact do_converge(const Params& p) {
  const std::string kind = p.choice("kind", {"both", "gaussian", "profile"});
  const int d = static_cast<int>(p.integer("d", 1, 1, 3));
  const double L = p.real("L", std::numbers::pi);
  struct Task {
    std::string kind;
    int j;
    double x;
  };
  std::vector<Task> tasks;
  if (kind != "profile")
    for (int j : p.ints("j", {8, 16, 32, 64}, 1, 100000))
      for (double x : p.reals("x", io::time_grid(0.0, 3.0, 12))) tasks.push_back({"gaussian", j, x});
  if (kind != "gaussian")
    for (int j : p.ints("j", {16, 32, 64}, 1, 100000))
      for (double x : p.reals("x", {0.5, 1.0, 2.0})) tasks.push_back({"profile", j, x});

  struct Result {
    double value, limit, error;
  };
  const auto results = parallel_map(tasks.size(), [&](std::size_t i) -> Result {
    const Task& t = tasks[i];
    if (t.kind == "gaussian") {
      const auto c = gaussian_convergence(std::vector<double>(static_cast<std::size_t>(d), t.x), t.j);
      return {c.f_j_value, c.gauss_value, c.error};
    }
    const auto [f, g] = dft_limit_profile(t.x, L, t.j);
    return {f, g, std::abs(f - g)};
  });

  Artifact a;
  a.columns = {"kind", "j", "x", "value", "limit", "error"};
  std::map<std::string, double> sup;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& t = tasks[i];
    const auto& r = results[i];
    a.rows.push_back({t.kind, t.j, t.x, r.value, r.limit, r.error});
    auto& s = sup["sup_error_" + t.kind + "_j" + std::to_string(t.j)];
    s = std::max(s, r.error);
  }
  for (const auto& [k, v] : sup) a.summary[k] = v;

  if (p.has("plot-dir")) {
    const std::filesystem::path dir = p.text("plot-dir", "");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ParamError("cannot create '" + dir.string() + "'");
    std::map<std::string, std::ofstream> files;
    auto stream = [&](const std::string& name) -> std::ofstream& {
      auto it = files.find(name);
      if (it == files.end()) {
        it = files.emplace(name, std::ofstream(dir / name, std::ios::binary | std::ios::trunc)).first;
        if (!it->second) throw ParamError("cannot write '" + (dir / name).string() + "'");
      }
      return it->second;
    };
    std::map<std::string, bool> limit_written;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const auto& t = tasks[i];
      stream(t.kind + "_j" + std::to_string(t.j) + ".dat")
          << io::format_number(t.x) << ' ' << io::format_number(results[i].value) << '\n';
      const std::string key = t.kind + "_" + io::format_number(t.x);
      if (!limit_written[key]) {
        stream(t.kind + "_limit.dat") << io::format_number(t.x) << ' ' << io::format_number(results[i].limit) << '\n';
        limit_written[key] = true;
      }
    }
    for (auto& [name, f] : files)
      if (!f.flush()) throw ParamError("failed writing '" + name + "'");
  }
  return a;
}

}  // namespace

std::span<const Subcommand> subcommands() { return kSubcommands; }

std::string_view subcommand_name(Subcommand s) {
  switch (s) {
    case Subcommand::Verify: return "verify";
    case Subcommand::Minimizer: return "minimizer";
    case Subcommand::Evolve: return "evolve";
    case Subcommand::Virial: return "virial";
    case Subcommand::Finite: return "finite";
    case Subcommand::Converge: return "converge";
  }
  return "?";
}

std::string_view subcommand_help(Subcommand s) {
  switch (s) {
    case Subcommand::Verify: return "Evaluate a lattice uncertainty inequality on given or random sequences";
    case Subcommand::Minimizer: return "Dump a lattice minimizer and check equality";
    case Subcommand::Evolve: return "Sample the discrete Schrodinger evolution of a datum";
    case Subcommand::Virial: return "Virial trace F(t) with its parabola fit";
    case Subcommand::Finite: return "Finite-sequence Virial values or minimizers";
    case Subcommand::Converge: return "Convergence tables towards the Gaussian and the periodic profile";
  }
  return "";
}

Subcommand parse_subcommand(std::string_view name) {
  for (Subcommand s : kSubcommands)
    if (subcommand_name(s) == name) return s;
  throw InvalidArgument("unknown subcommand '" + std::string(name) + "'");
}

std::span<const ParamSpec> parameters(Subcommand s) {
  switch (s) {
    case Subcommand::Verify: return kVerify;
    case Subcommand::Minimizer: return kMinimizer;
    case Subcommand::Evolve: return kEvolve;
    case Subcommand::Virial: return kVirial;
    case Subcommand::Finite: return kFinite;
    case Subcommand::Converge: return kConverge;
  }
  return {};
}

std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("UNCERTAINTY_LAB_THREADS")) {
    std::size_t cap = 0;
    const std::string_view s(env);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
    if (ec == std::errc{} && p == s.data() + s.size() && cap > 0) n = std::min(n, cap);
  }
  return n;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& log) {
  try {
    const Params p(config);
    Artifact a;
    switch (config.subcommand) {
      case Subcommand::Verify: a = do_verify(p); break;
      case Subcommand::Minimizer: a = do_minimizer(p); break;
      case Subcommand::Evolve: a = do_evolve(p); break;
      case Subcommand::Virial: a = do_virial(p); break;
      case Subcommand::Finite: a = do_finite(p); break;
      case Subcommand::Converge: a = do_converge(p); break;
    }
    write_artifact(a, config.subcommand, p, out, log);
    return kExitOk;
  } catch (const InvalidArgument& e) {
    log << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    log << "failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace ulab::cli
