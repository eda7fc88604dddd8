// Copyright 2026 The dqc1lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "dqc1/channel.hpp"
#include "dqc1/energetics.hpp"
#include "dqc1/entropy.hpp"
#include "dqc1/families.hpp"
#include "dqc1/matrix_json.hpp"
#include "dqc1/register.hpp"
#include "dqc1/thermo.hpp"

/// Command driver shared by the dqc1lab executable and its tests.
namespace dqc1::cli {

using nlohmann::json;

enum class Format { csv, json };

inline const char* format_name(Format f) { return f == Format::csv ? "csv" : "json"; }

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"simulate",      "sample",       "kraus",      "choi",
                                              "work-dist",     "entropy-sweep", "crooks-check", "energetics",
                                              "unitality-scan"};
  return names;
}

struct RunConfig {
  std::string command;
  std::string family = "iswap";  // iswap | identity | haar; ignored when `unitary` is set
  std::string unitary;           // "iswap:<theta>", "identity:<n>", "haar:<n>:<seed>" or a Matrix JSON path
  std::vector<double> alpha_grid{1.0};
  std::vector<double> theta_grid{std::numbers::pi};
  std::vector<double> t_grid;
  int n = 2;
  double omega = 1.0;
  std::vector<double> ancilla_freqs;
  long long shots = 1000;
  std::uint64_t seed = 0;
  std::string output;  // empty or "-" writes to stdout
  Format format = Format::csv;
  Basis basis = Basis::Z;
  int samples = 100;
  std::string env = "mixed";       // mixed | product:<p> | random
  std::string dilation = "haar";   // haar | separable | controlled
  std::string route = "dilation";  // kraus: dilation | choi; choi: numeric | closed-form
  int threads = 0;                 // 0 = hardware concurrency
};

// ---------------------------------------------------------------------------
// Parsing helpers

/// "start:end:count" (inclusive), a comma list, or a single value.
inline std::vector<double> parse_grid(const std::string& text) {
  detail::require(!text.empty(), "empty grid");
  if (text.find(',') != std::string::npos) {
    std::vector<double> out;
    for (const auto& part : split(text, ',')) out.push_back(parse_scalar(part));
    return out;
  }
  const auto parts = split(text, ':');
  if (parts.size() == 1) return {parse_scalar(parts[0])};
  detail::require(parts.size() == 3, "grid '" + text + "' must be start:end:count");
  const double a = parse_scalar(parts[0]);
  const double b = parse_scalar(parts[1]);
  const long long count = parse_integer(parts[2]);
  detail::require(count >= 1, "grid '" + text + "': count must be >= 1");
  if (count == 1) return {a};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (long long k = 0; k < count; ++k)
    out[static_cast<std::size_t>(k)] = a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1);
  out.back() = b;
  return out;
}

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw InvalidInput("unknown format '" + s + "' (expected csv or json)");
}

inline Basis parse_basis(const std::string& s) {
  if (s == "Z" || s == "z") return Basis::Z;
  if (s == "Y" || s == "y") return Basis::Y;
  throw InvalidInput("unknown basis '" + s + "' (expected Z or Y)");
}

namespace detail {

inline std::vector<double> grid_from_json(const json& j) {
  if (j.is_string()) return parse_grid(j.get<std::string>());
  if (j.is_number()) return {j.get<double>()};
  dqc1::detail::require(j.is_array(), "grid must be a string, number or array");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(e.is_string() ? parse_scalar(e.get<std::string>()) : e.get<double>());
  return out;
}

}  // namespace detail

/// Applies the keys of a JSON config object on top of `cfg`.
inline void apply_config_json(RunConfig& cfg, const json& j) {
  dqc1::detail::require(j.is_object(), "config file must hold a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "command") cfg.command = value.get<std::string>();
      else if (key == "family") cfg.family = value.get<std::string>();
      else if (key == "unitary") cfg.unitary = value.get<std::string>();
      else if (key == "alpha_grid" || key == "alpha") cfg.alpha_grid = detail::grid_from_json(value);
      else if (key == "theta_grid" || key == "theta") cfg.theta_grid = detail::grid_from_json(value);
      else if (key == "t_grid") cfg.t_grid = detail::grid_from_json(value);
      else if (key == "n") cfg.n = value.get<int>();
      else if (key == "omega") cfg.omega = value.get<double>();
      else if (key == "ancilla_freqs") cfg.ancilla_freqs = detail::grid_from_json(value);
      else if (key == "shots") cfg.shots = value.get<long long>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "output") cfg.output = value.get<std::string>();
      else if (key == "format") cfg.format = parse_format(value.get<std::string>());
      else if (key == "basis") cfg.basis = parse_basis(value.get<std::string>());
      else if (key == "samples") cfg.samples = value.get<int>();
      else if (key == "env") cfg.env = value.get<std::string>();
      else if (key == "dilation") cfg.dilation = value.get<std::string>();
      else if (key == "route") cfg.route = value.get<std::string>();
      else if (key == "threads") cfg.threads = value.get<int>();
      else throw InvalidInput("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config file: ") + e.what());
  }
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  dqc1::detail::require(static_cast<bool>(in), "cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInput("config file " + path + ": " + e.what());
  }
  RunConfig cfg;
  apply_config_json(cfg, j);
  return cfg;
}

// ---------------------------------------------------------------------------
// Determinism utilities

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent seed for a named stage, so adding a stage never shifts the others.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : stage) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(seed ^ splitmix64(h));
}

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Evaluates fn(0..count-1) on a worker pool; results come back in index order.
template <class T>
std::vector<T> parallel_map(std::size_t count, int threads, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(count);
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) out[k] = fn(k);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          out[k] = fn(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

/// Shortest round-trip decimal form; inf and nan spelled out.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// JSON has no infinity; unbounded values are written as the string "inf".
inline json json_number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline json json_optional(const std::optional<double>& x, const char* empty) {
  return x ? json_number(*x) : json(empty);
}

// ---------------------------------------------------------------------------
// Run context

struct CheckFailure {
  std::string cell;
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
};

/// Output routing plus accumulated check failures.
class Context {
 public:
  Context(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {}

  [[nodiscard]] const RunConfig& config() const { return cfg_; }

  void check(const std::string& cell, const std::string& name, double residual, double tolerance) {
    if (!(residual <= tolerance)) failures_.push_back({cell, name, residual, tolerance});
  }

  [[nodiscard]] const std::vector<CheckFailure>& failures() const { return failures_; }
  [[nodiscard]] const std::vector<std::string>& written() const { return written_; }

  /// Writes `body` to the configured output; `suffix` distinguishes several
  /// files produced by one run (e.g. one per alpha).
  void emit(const std::string& body, const std::string& suffix = {}) {
    if (cfg_.output.empty() || cfg_.output == "-") {
      out_ << body;
      return;
    }
    std::filesystem::path path(cfg_.output);
    if (const char* dir = std::getenv("DQC1LAB_OUTPUT_DIR"); dir && *dir && path.is_relative())
      path = std::filesystem::path(dir) / path;
    if (!suffix.empty()) path.replace_filename(path.stem().string() + suffix + path.extension().string());
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    dqc1::detail::require(static_cast<bool>(f), "cannot write output file " + path.string());
    f << body;
    written_.push_back(path.string());
  }

 private:
  const RunConfig& cfg_;
  std::ostream& out_;
  std::vector<CheckFailure> failures_;
  std::vector<std::string> written_;
};

/// One target unitary of a sweep.
struct Cell {
  CMatrix u;
  std::string label;
  std::optional<double> theta;
};

/// Target unitaries selected by the config: one per theta for the iswap
/// family, a single one otherwise.
inline std::vector<Cell> resolve_cells(const RunConfig& cfg) {
  std::vector<Cell> cells;
  if (!cfg.unitary.empty()) {
    auto src = resolve_unitary(cfg.unitary);
    cells.push_back({std::move(src.u), src.label, src.theta});
    return cells;
  }
  if (cfg.family == "iswap") {
    dqc1::detail::require(cfg.n == 2, "iswap family acts on n = 2 ancillas");
    for (double theta : cfg.theta_grid) cells.push_back({iswap(theta), "iswap:" + fmt(theta), theta});
    return cells;
  }
  dqc1::detail::require(cfg.n >= 1, "n must be >= 1");
  if (cfg.n > kMaxAncillas)
    throw DimensionCap("n = " + std::to_string(cfg.n) + " exceeds cap " + std::to_string(kMaxAncillas));
  const Eigen::Index d = Eigen::Index{1} << cfg.n;
  if (cfg.family == "identity") {
    cells.push_back({linalg::identity(d), "identity:" + std::to_string(cfg.n), std::nullopt});
  } else if (cfg.family == "haar") {
    const std::uint64_t s = derive_seed(cfg.seed, "unitary");
    cells.push_back({linalg::haar_unitary(d, s), "haar:" + std::to_string(cfg.n) + ":" + std::to_string(s),
                     std::nullopt});
  } else if (cfg.family == "real-trace") {
    const std::uint64_t s = derive_seed(cfg.seed, "unitary");
    cells.push_back({real_trace_unitary(cfg.n, s), "real-trace:" + std::to_string(cfg.n), std::nullopt});
  } else {
    throw InvalidInput("unknown family '" + cfg.family + "' (expected iswap, identity, haar or real-trace)");
  }
  return cells;
}

inline std::string theta_field(const Cell& c) { return c.theta ? fmt(*c.theta) : std::string(); }

inline json theta_json(const Cell& c) { return c.theta ? json(*c.theta) : json(nullptr); }

inline void validate_alpha_grid(const RunConfig& cfg) {
  dqc1::detail::require(!cfg.alpha_grid.empty(), "alpha grid is empty");
  for (double a : cfg.alpha_grid)
    dqc1::detail::require(a >= 0.0 && a <= 1.0, "alpha " + fmt(a) + " outside [0, 1]");
}

inline std::string alpha_suffix(double alpha) { return "_alpha" + fmt(alpha); }

inline const Cell& single_cell(const std::vector<Cell>& cells, const char* command) {
  dqc1::detail::require(cells.size() == 1, std::string(command) + " needs a single target unitary");
  return cells.front();
}

inline std::string cell_name(double alpha, const Cell& c) { return "alpha=" + fmt(alpha) + " " + c.label; }


// ---------------------------------------------------------------------------
// Commands

inline void cmd_simulate(Context& ctx) {
  const auto& cfg = ctx.config();
  validate_alpha_grid(cfg);
  const auto cells = resolve_cells(cfg);
  struct Row {
    double alpha;
    const Cell* cell;
    cplx tau;
    double mu, pz;
    CMatrix rho;
  };
  const std::size_t count = cfg.alpha_grid.size() * cells.size();
  const auto rows = parallel_map<Row>(count, resolve_threads(cfg.threads), [&](std::size_t k) {
    const double alpha = cfg.alpha_grid[k / cells.size()];
    const Cell& c = cells[k % cells.size()];
    const auto ch = DQC1Channel::trace_estimation(c.u, cfg.basis);
    const double mu = mu_of(ch.dilation_unitary(), ch.n());
    return Row{alpha, &c, normalized_trace(c.u), mu, p_zero(std::clamp(mu, -1.0, 1.0), alpha),
               ch.apply(logical_state(alpha))};
  });

  std::ostringstream csv;
  json arr = json::array();
  csv << "alpha,theta,basis,re_trace,im_trace,mu,p_zero,rho00,rho11,rho01_re,rho01_im\n";
  for (const auto& r : rows) {
    const double readout = cfg.basis == Basis::Z ? r.tau.real() : r.tau.imag();
    const std::string name = cell_name(r.alpha, *r.cell);
    ctx.check(name, "trace_preserved", std::abs(r.rho.trace() - 1.0), 1e-12);
    ctx.check(name, "mu_matches_trace", std::abs(r.mu - readout), 1e-10);
    ctx.check(name, "logical_polarization", std::abs((r.rho(0, 0) - r.rho(1, 1)).real() - r.alpha * readout), 1e-10);
    csv << fmt(r.alpha) << ',' << theta_field(*r.cell) << ',' << basis_name(cfg.basis) << ','
        << fmt(r.tau.real()) << ',' << fmt(r.tau.imag()) << ',' << fmt(r.mu) << ',' << fmt(r.pz) << ','
        << fmt(r.rho(0, 0).real()) << ',' << fmt(r.rho(1, 1).real()) << ',' << fmt(r.rho(0, 1).real()) << ','
        << fmt(r.rho(0, 1).imag()) << '\n';
    arr.push_back({{"alpha", r.alpha},
                   {"theta", theta_json(*r.cell)},
                   {"unitary", r.cell->label},
                   {"basis", basis_name(cfg.basis)},
                   {"re_trace", r.tau.real()},
                   {"im_trace", r.tau.imag()},
                   {"mu", r.mu},
                   {"p_zero", r.pz},
                   {"final_logical_state", matrix_to_json(r.rho)}});
  }
  ctx.emit(cfg.format == Format::csv ? csv.str() : arr.dump(2) + "\n");
}

inline void cmd_sample(Context& ctx) {
  const auto& cfg = ctx.config();
  validate_alpha_grid(cfg);
  dqc1::detail::require(cfg.shots >= 1, "shots must be >= 1");
  const auto cells = resolve_cells(cfg);
  const std::size_t count = cfg.alpha_grid.size() * cells.size();
  const std::uint64_t base = derive_seed(cfg.seed, "sample");
  const auto results = parallel_map<TraceEstimate>(count, resolve_threads(cfg.threads), [&](std::size_t k) {
    const double alpha = cfg.alpha_grid[k / cells.size()];
    const Cell& c = cells[k % cells.size()];
    const auto spec = RegisterSpec::make(ancilla_count(c.u), alpha, cfg.omega, cfg.ancilla_freqs);
    return sample_trace(spec, c.u, cfg.basis, cfg.shots, base + 1000003ULL * k);
  });

  std::ostringstream csv;
  json arr = json::array();
  csv << "alpha,theta,basis,shots,estimate,std_error,exact\n";
  for (std::size_t k = 0; k < count; ++k) {
    const double alpha = cfg.alpha_grid[k / cells.size()];
    const Cell& c = cells[k % cells.size()];
    const cplx tr = c.u.trace();
    const double exact = cfg.basis == Basis::Z ? tr.real() : tr.imag();
    const auto& r = results[k];
    csv << fmt(alpha) << ',' << theta_field(c) << ',' << basis_name(r.basis) << ',' << r.shots << ','
        << fmt(r.estimate) << ',' << fmt(r.std_error) << ',' << fmt(exact) << '\n';
    arr.push_back({{"alpha", alpha},
                   {"theta", theta_json(c)},
                   {"unitary", c.label},
                   {"basis", basis_name(r.basis)},
                   {"shots", r.shots},
                   {"seed", cfg.seed},
                   {"estimate", r.estimate},
                   {"std_error", r.std_error},
                   {"exact", exact}});
  }
  ctx.emit(cfg.format == Format::csv ? csv.str() : arr.dump(2) + "\n");
}

inline void cmd_kraus(Context& ctx) {
  const auto& cfg = ctx.config();
  dqc1::detail::require(cfg.format == Format::json, "kraus writes JSON only (use --format json)");
  const auto cells = resolve_cells(cfg);
  const Cell& c = single_cell(cells, "kraus");
  const auto ch = DQC1Channel::trace_estimation(c.u, cfg.basis);
  KrausSet ks;
  if (cfg.route == "dilation") ks = ch.kraus();
  else if (cfg.route == "choi") ks = kraus_from_choi(choi_numeric(ch));
  else throw InvalidInput("kraus route must be dilation or choi");

  ctx.check(c.label, "trace_preservation", trace_preservation_defect(ks), 1e-11);
  ctx.check(c.label, "unitality", unitality_defect(ks), 1e-11);
  json arr = json::array();
  for (std::size_t k = 0; k < ks.size(); ++k) {
    json m = matrix_to_json(ks.operators[k]);
    m["label"] = {ks.labels[k].first, ks.labels[k].second};
    arr.push_back(std::move(m));
  }
  ctx.emit(arr.dump(2) + "\n");
}

inline void cmd_choi(Context& ctx) {
  const auto& cfg = ctx.config();
  dqc1::detail::require(cfg.format == Format::json, "choi writes JSON only (use --format json)");
  const auto cells = resolve_cells(cfg);
  const Cell& c = single_cell(cells, "choi");
  const auto ch = DQC1Channel::trace_estimation(c.u, cfg.basis);
  const ChoiMatrix numeric = choi_numeric(ch);
  const int n = ancilla_count(c.u);
  const cplx tr = c.u.trace();
  // The closed form is written for the Z-basis circuit.
  std::optional<ChoiMatrix> closed;
  if (cfg.basis == Basis::Z) closed = choi_closed_form(tr.real(), tr.imag(), n);

  ChoiMatrix out;
  if (cfg.route == "numeric" || cfg.route == "dilation") {
    out = numeric;
  } else if (cfg.route == "closed-form") {
    dqc1::detail::require(closed.has_value(), "closed-form Choi matrix needs basis Z");
    out = *closed;
  } else {
    throw InvalidInput("choi route must be numeric or closed-form");
  }
  ctx.check(c.label, "hermitian", out.hermiticity_defect(), 1e-12);
  ctx.check(c.label, "positive", std::max(0.0, -out.min_eigenvalue()), 1e-12);
  ctx.check(c.label, "trace_two", std::abs(out.matrix.trace() - 2.0), 1e-12);
  if (closed) ctx.check(c.label, "closed_form_agreement", (numeric.matrix - closed->matrix).norm(), 1e-11);
  ctx.emit(matrix_to_json(out.matrix).dump(2) + "\n");
}

inline void cmd_work_dist(Context& ctx) {
  const auto& cfg = ctx.config();
  validate_alpha_grid(cfg);
  const auto cells = resolve_cells(cfg);
  const std::size_t count = cfg.alpha_grid.size() * cells.size();
  std::vector<DQC1Channel> channels;
  for (const auto& c : cells) channels.push_back(DQC1Channel::trace_estimation(c.u));
  const auto dists = parallel_map<WorkDistribution>(count, resolve_threads(cfg.threads), [&](std::size_t k) {
    return work_distribution(cfg.alpha_grid[k / cells.size()], cfg.omega, channels[k % cells.size()]);
  });

  const double gap = 2.0 * cfg.omega;
  json all = json::array();
  const bool to_files = !(cfg.output.empty() || cfg.output == "-");
  std::ostringstream combined;
  const std::string header = "alpha,theta,work,probability\n";
  combined << header;
  for (std::size_t a = 0; a < cfg.alpha_grid.size(); ++a) {
    const double alpha = cfg.alpha_grid[a];
    std::ostringstream csv;
    csv << header;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      const auto& wd = dists[a * cells.size() + ci];
      const Cell& c = cells[ci];
      const double t = std::clamp(normalized_trace(c.u).real(), -1.0, 1.0);
      const std::string name = cell_name(alpha, c);
      ctx.check(name, "normalization", std::abs(wd.total_probability() - 1.0), 1e-12);
      ctx.check(name, "first_moment", std::abs(moment(wd, 1) - mean_work(alpha, cfg.omega, t)), 1e-12);
      double off_support = 0.0;
      for (const auto& p : wd.points) {
        const double dist = std::min({std::abs(p.work + gap), std::abs(p.work), std::abs(p.work - gap)});
        off_support = std::max(off_support, dist);
      }
      ctx.check(name, "support", off_support, 1e-12);
      json pts = json::array();
      for (const auto& p : wd.points) {
        csv << fmt(alpha) << ',' << theta_field(c) << ',' << fmt(p.work) << ',' << fmt(p.probability) << '\n';
        pts.push_back({{"work", p.work}, {"probability", p.probability}});
      }
      all.push_back({{"alpha", alpha},
                     {"theta", theta_json(c)},
                     {"unitary", c.label},
                     {"points", pts},
                     {"mean", moment(wd, 1)},
                     {"second_moment", moment(wd, 2)},
                     {"variance", variance(wd)}});
    }
    if (cfg.format == Format::csv) {
      const std::string body = csv.str();
      if (to_files) ctx.emit(body, cfg.alpha_grid.size() > 1 ? alpha_suffix(alpha) : std::string());
      else combined << body.substr(header.size());
    }
  }
  if (cfg.format == Format::json) ctx.emit(all.dump(2) + "\n");
  else if (!to_files) ctx.emit(combined.str());
}

inline void cmd_entropy_sweep(Context& ctx) {
  const auto& cfg = ctx.config();
  validate_alpha_grid(cfg);
  const std::vector<double> ts = cfg.t_grid.empty() ? parse_grid("-1:1:101") : cfg.t_grid;
  for (double t : ts) dqc1::detail::require(std::abs(t) <= 1.0, "t " + fmt(t) + " outside [-1, 1]");
  std::ostringstream csv;
  json arr = json::array();
  csv << "alpha,t,delta_S_C\n";
  for (double alpha : cfg.alpha_grid)
    for (double t : ts) {
      const double ds = delta_entropy_logical(alpha, t);
      ctx.check("alpha=" + fmt(alpha) + " t=" + fmt(t), "nonnegative", std::max(0.0, -ds), 1e-12);
      csv << fmt(alpha) << ',' << fmt(t) << ',' << fmt(ds) << '\n';
      arr.push_back({{"alpha", alpha}, {"t", t}, {"delta_S_C", ds}});
    }
  ctx.emit(cfg.format == Format::csv ? csv.str() : arr.dump(2) + "\n");
}

inline json crooks_json(const CrooksReport& r, const Cell& c) {
  json support = json::array();
  json paper = json::array();
  for (const auto& p : r.support) {
    support.push_back({{"work", p.work},
                       {"p_forward", p.p_forward},
                       {"p_reverse", p.p_reverse},
                       {"ratio", p.ratio},
                       {"expected", p.expected},
                       {"deviation", p.deviation}});
    paper.push_back({{"work", p.work}, {"free_energy_form", p.free_energy_form}});
  }
  return {{"alpha", r.alpha},
          {"theta", theta_json(c)},
          {"unitary", c.label},
          {"omega", r.omega},
          {"status", crooks_status_name(r.status)},
          {"beta", r.beta ? json_number(*r.beta) : json("inf")},
          {"support", support},
          {"max_ratio_deviation", r.max_ratio_deviation},
          {"paper_form_values",
           {{"final_polarization", r.final_polarization},
            {"omega_prime", json_optional(r.omega_prime, "undefined")},
            {"delta_free_energy", json_optional(r.delta_free_energy, "undefined")},
            {"delta_S_C", r.delta_S_C},
            {"exp_delta_S_C", r.exp_delta_S_C},
            {"mean_entropy_production", r.mean_entropy_production},
            {"final_state_diagonal", r.final_state_diagonal},
            {"free_energy_form", paper}}}};
}

inline void cmd_crooks_check(Context& ctx) {
  const auto& cfg = ctx.config();
  validate_alpha_grid(cfg);
  const auto cells = resolve_cells(cfg);
  std::vector<DQC1Channel> channels;
  for (const auto& c : cells) channels.push_back(DQC1Channel::trace_estimation(c.u));
  const std::size_t count = cfg.alpha_grid.size() * cells.size();
  const auto reports = parallel_map<CrooksReport>(count, resolve_threads(cfg.threads), [&](std::size_t k) {
    return crooks_check(cfg.alpha_grid[k / cells.size()], cfg.omega, channels[k % cells.size()]);
  });
  std::ostringstream csv;
  json arr = json::array();
  csv << "alpha,theta,status,work,p_forward,p_reverse,ratio,expected,deviation,free_energy_form\n";
  for (std::size_t k = 0; k < count; ++k) {
    const auto& r = reports[k];
    const Cell& c = cells[k % cells.size()];
    if (r.status == CrooksStatus::ok) ctx.check(cell_name(r.alpha, c), "crooks_ratio", r.max_ratio_deviation, 1e-10);
    for (const auto& p : r.support)
      csv << fmt(r.alpha) << ',' << theta_field(c) << ',' << crooks_status_name(r.status) << ',' << fmt(p.work) << ','
          << fmt(p.p_forward) << ',' << fmt(p.p_reverse) << ',' << fmt(p.ratio) << ',' << fmt(p.expected) << ','
          << fmt(p.deviation) << ',' << fmt(p.free_energy_form) << '\n';
    if (r.support.empty())
      csv << fmt(r.alpha) << ',' << theta_field(c) << ',' << crooks_status_name(r.status) << ",,,,,,,\n";
    arr.push_back(crooks_json(r, c));
  }
  ctx.emit(cfg.format == Format::csv ? csv.str() : arr.dump(2) + "\n");
}

inline json energetics_json(const EnergeticsReport& r, const Cell& c, const RegisterSpec& spec) {
  json checks = json::array();
  for (const auto& ck : r.checks)
    checks.push_back({{"name", ck.name},
                      {"residual", ck.residual},
                      {"tolerance", ck.tolerance},
                      {"skipped", ck.skipped},
                      {"passed", ck.passed()},
                      {"note", ck.note}});
  json sigma_a;
  if (r.sigma_A) sigma_a = *r.sigma_A;
  else sigma_a = {{"beta", "inf"}, {"delta_E_C", r.delta_E_C}};
  return {{"input",
           {{"n", r.n},
            {"alpha", r.alpha},
            {"omega", r.omega},
            {"theta", theta_json(c)},
            {"unitary", c.label},
            {"ancilla_freqs", spec.ancilla_freqs}}},
          {"t", r.t},
          {"t_imag", r.t_imag},
          {"real_trace", r.real_trace},
          {"delta_S_C", r.delta_S_C},
          {"mutual_info", r.mutual_info},
          {"rel_entropy_env", r.rel_entropy_env},
          {"rel_entropy_logical", json_number(r.rel_entropy_logical)},
          {"sigma_C", r.sigma_C},
          {"beta_C", json_optional(r.beta_C, "inf")},
          {"sigma_A", sigma_a},
          {"sigma_A_landauer", json_number(r.sigma_A_landauer)},
          {"heat_to_ancilla", r.heat_to_ancilla},
          {"delta_E_C", r.delta_E_C},
          {"mean_work_C", r.mean_work_C},
          {"global_entropy_defect", r.global_entropy_defect},
          {"commutator_norm", nullptr},
          {"checks", checks}};
}

inline void cmd_energetics(Context& ctx) {
  const auto& cfg = ctx.config();
  validate_alpha_grid(cfg);
  const auto cells = resolve_cells(cfg);
  struct Out {
    EnergeticsReport report;
    RegisterSpec spec;
    double commutator = 0.0;
  };
  const std::size_t count = cfg.alpha_grid.size() * cells.size();
  const auto outs = parallel_map<Out>(count, resolve_threads(cfg.threads), [&](std::size_t k) {
    const Cell& c = cells[k % cells.size()];
    const auto spec = RegisterSpec::make(ancilla_count(c.u), cfg.alpha_grid[k / cells.size()], cfg.omega,
                                         cfg.ancilla_freqs);
    Out o{energetics_report(spec, c.u), spec, 0.0};
    o.commutator = commutator_energy_check(trace_estimation_unitary(c.u), spec);
    return o;
  });
  std::ostringstream csv;
  json arr = json::array();
  csv << "alpha,theta,delta_S_C,delta_E_C,mutual_info,sigma_A\n";
  for (std::size_t k = 0; k < count; ++k) {
    const auto& o = outs[k];
    const auto& r = o.report;
    const Cell& c = cells[k % cells.size()];
    for (const auto& ck : r.checks)
      if (!ck.skipped) ctx.check(cell_name(r.alpha, c), ck.name, ck.residual, ck.tolerance);
    csv << fmt(r.alpha) << ',' << theta_field(c) << ',' << fmt(r.delta_S_C) << ',' << fmt(r.delta_E_C) << ','
        << fmt(r.mutual_info) << ',' << (r.sigma_A ? fmt(*r.sigma_A) : std::string()) << '\n';
    json j = energetics_json(r, c, o.spec);
    j["commutator_norm"] = o.commutator;
    arr.push_back(std::move(j));
  }
  ctx.emit(cfg.format == Format::csv ? csv.str() : arr.dump(2) + "\n");
}

/// Environment state for unitality scans; "random" draws a fresh full-rank state per sample.
inline CMatrix scan_environment(const std::string& env, int n, std::uint64_t seed) {
  const Eigen::Index d = Eigen::Index{1} << n;
  if (env == "mixed") return maximally_mixed(d);
  if (env.rfind("product:", 0) == 0) {
    const double p = parse_scalar(env.substr(8));
    dqc1::detail::require(p >= 0.0 && p <= 1.0, "product environment: p must lie in [0, 1]");
    CMatrix q = CMatrix::Zero(2, 2);
    q(0, 0) = p;
    q(1, 1) = 1.0 - p;
    CMatrix s = q;
    for (int k = 1; k < n; ++k) s = linalg::tensor(s, q);
    return s;
  }
  if (env == "random") {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    CMatrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx(g(rng), g(rng));
    CMatrix rho = a * a.adjoint();
    rho /= rho.trace().real();
    return 0.5 * (rho + rho.adjoint());
  }
  throw InvalidInput("unknown environment '" + env + "' (expected mixed, product:<p> or random)");
}

inline CMatrix scan_dilation(const std::string& kind, int n, std::uint64_t seed) {
  const Eigen::Index d = Eigen::Index{1} << n;
  if (kind == "haar") return linalg::haar_unitary(2 * d, seed);
  if (kind == "separable") return linalg::tensor(linalg::haar_unitary(2, seed), linalg::haar_unitary(d, seed + 1));
  if (kind == "controlled") {
    CMatrix v = CMatrix::Zero(2 * d, 2 * d);
    v.topLeftCorner(d, d) = linalg::haar_unitary(d, seed);
    v.bottomRightCorner(d, d) = linalg::haar_unitary(d, seed + 1);
    return v;
  }
  throw InvalidInput("unknown dilation '" + kind + "' (expected haar, separable or controlled)");
}

inline void cmd_unitality_scan(Context& ctx) {
  const auto& cfg = ctx.config();
  dqc1::detail::require(cfg.samples >= 1, "samples must be >= 1");
  dqc1::detail::require(cfg.n >= 1, "n must be >= 1");
  if (cfg.n > kMaxAncillas)
    throw DimensionCap("n = " + std::to_string(cfg.n) + " exceeds cap " + std::to_string(kMaxAncillas));
  const std::uint64_t vseed = derive_seed(cfg.seed, "unitality-dilation");
  const std::uint64_t eseed = derive_seed(cfg.seed, "unitality-env");
  const auto defects =
      parallel_map<double>(static_cast<std::size_t>(cfg.samples), resolve_threads(cfg.threads), [&](std::size_t k) {
        const CMatrix v = scan_dilation(cfg.dilation, cfg.n, vseed + 2 * k);
        const CMatrix env = scan_environment(cfg.env, cfg.n, eseed + k);
        return unitality_defect(kraus_from_dilation(v, env));
      });

  // Unitality is guaranteed for a maximally mixed environment, and for any
  // environment when the dilation is separable or system-controlled.
  const bool guaranteed = cfg.env == "mixed" || cfg.dilation != "haar";
  double mx = 0.0, mn = kInfinity, sum = 0.0;
  int above_tight = 0, above_loose = 0;
  for (double x : defects) {
    mx = std::max(mx, x);
    mn = std::min(mn, x);
    sum += x;
    above_tight += x > 1e-10;
    above_loose += x > 1e-3;
  }
  if (guaranteed) ctx.check("unitality-scan", "unitality", mx, 1e-10);

  if (cfg.format == Format::csv) {
    std::ostringstream csv;
    csv << "sample,n,env,dilation,defect\n";
    for (std::size_t k = 0; k < defects.size(); ++k)
      csv << k << ',' << cfg.n << ',' << cfg.env << ',' << cfg.dilation << ',' << fmt(defects[k]) << '\n';
    ctx.emit(csv.str());
  } else {
    json j = {{"n", cfg.n},
              {"samples", cfg.samples},
              {"env", cfg.env},
              {"dilation", cfg.dilation},
              {"seed", cfg.seed},
              {"unitality_guaranteed", guaranteed},
              {"max_defect", mx},
              {"min_defect", mn},
              {"mean_defect", sum / static_cast<double>(defects.size())},
              {"count_above_1e-10", above_tight},
              {"count_above_1e-3", above_loose},
              {"defects", defects}};
    ctx.emit(j.dump(2) + "\n");
  }
}

// ---------------------------------------------------------------------------
// Entry point

inline const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const DimensionCap*>(&e)) return "dimension cap";
  if (dynamic_cast<const Unestimable*>(&e)) return "unestimable";
  if (dynamic_cast<const InvalidInput*>(&e)) return "invalid input";
  return "internal error";
}

inline void write_error(std::ostream& err, const std::exception& e) {
  err << json{{"error", error_kind(e)}, {"message", e.what()}}.dump() << "\n";
}

/// Runs one command. Exit status: 0 if every check passed, 1 if a check
/// failed, 2 on configuration or input errors (reported as JSON on `err`).
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    Context ctx(cfg, out);
    const std::string& c = cfg.command;
    if (c == "simulate") cmd_simulate(ctx);
    else if (c == "sample") cmd_sample(ctx);
    else if (c == "kraus") cmd_kraus(ctx);
    else if (c == "choi") cmd_choi(ctx);
    else if (c == "work-dist") cmd_work_dist(ctx);
    else if (c == "entropy-sweep") cmd_entropy_sweep(ctx);
    else if (c == "crooks-check") cmd_crooks_check(ctx);
    else if (c == "energetics") cmd_energetics(ctx);
    else if (c == "unitality-scan") cmd_unitality_scan(ctx);
    else throw InvalidInput("unknown command '" + c + "'");

    if (ctx.failures().empty()) return 0;
    json failures = json::array();
    for (const auto& f : ctx.failures())
      failures.push_back({{"cell", f.cell}, {"check", f.name}, {"residual", json_number(f.residual)},
                          {"tolerance", f.tolerance}});
    err << json{{"error", "check failed"}, {"failures", failures}}.dump() << "\n";
    return 1;
  } catch (const InvalidInput& e) {
    write_error(err, e);
    return 2;
  } catch (const Unestimable& e) {
    write_error(err, e);
    return 2;
  } catch (const std::exception& e) {
    write_error(err, e);
    return 3;
  }
}

}  // namespace dqc1::cli
