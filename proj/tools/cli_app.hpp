#pragma once

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lqg/lqg.hpp"

namespace lqg::cli {

enum ExitCode { Ok = 0, CheckFailure = 2, InvalidConfig = 3, RuntimeFailure = 4 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"sample-field",     "build-measure", "euclid-exponent", "quantum-exponent",
                                          "verify",           "kpz-table",     "count-quads"};
  return c;
}

// Parses "2^-7..2^-11" (every dyadic in between), or a comma list of numbers and "2^-k" terms.
inline std::vector<double> parse_scales(const std::string& text) {
  auto dyadic_exponent = [&](std::string t) -> int {
    if (t.rfind("2^", 0) != 0) throw ConfigError("scale range endpoints must look like 2^-k: " + t);
    return std::stoi(t.substr(2));
  };
  auto term = [&](const std::string& t) -> double {
    if (t.rfind("2^", 0) == 0) return std::ldexp(1.0, std::stoi(t.substr(2)));
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw ConfigError("bad scale: " + t);
    return v;
  };
  std::vector<double> out;
  try {
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
      const int a = dyadic_exponent(text.substr(0, dots));
      const int b = dyadic_exponent(text.substr(dots + 2));
      const int step = a <= b ? 1 : -1;
      for (int k = a;; k += step) {
        out.push_back(std::ldexp(1.0, k));
        if (k == b) break;
      }
    } else {
      std::stringstream ss(text);
      std::string t;
      while (std::getline(ss, t, ','))
        if (!t.empty()) out.push_back(term(t));
    }
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse scales: " + text);
  }
  for (double v : out)
    if (!(v > 0.0 && v < 1.0)) throw ConfigError("scales must lie in (0, 1): " + text);
  if (out.empty()) throw ConfigError("empty scale list");
  return out;
}

inline std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string t;
  try {
    while (std::getline(ss, t, ',')) out.push_back(std::stod(t));
  } catch (const std::logic_error&) {
    throw ConfigError("expected comma-separated numbers: " + text);
  }
  return out;
}

// "segment:x0,y0,x1,y1" | "point:x,y" | "full" | "box:SIDE:MASK:DEPTH" (MASK row-major in x, '1' keeps)
inline FractalSet parse_set(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "full") return FractalSet::full_square();
  if (kind == "segment") {
    const auto v = rest.empty() ? std::vector<double>{0.25, 0.5, 0.75, 0.5} : parse_numbers(rest);
    if (v.size() != 4) throw ConfigError("segment needs x0,y0,x1,y1");
    return FractalSet::segment({v[0], v[1]}, {v[2], v[3]});
  }
  if (kind == "point") {
    const auto v = rest.empty() ? std::vector<double>{0.5, 0.5} : parse_numbers(rest);
    if (v.size() != 2) throw ConfigError("point needs x,y");
    return FractalSet::point({v[0], v[1]});
  }
  if (kind == "box") {
    std::stringstream ss(rest);
    std::string side, mask, depth;
    std::getline(ss, side, ':');
    std::getline(ss, mask, ':');
    std::getline(ss, depth, ':');
    try {
      std::vector<bool> keep;
      for (char c : mask) keep.push_back(c == '1');
      return FractalSet::box_fractal(std::stoi(side), keep, std::stoi(depth));
    } catch (const std::logic_error&) {
      throw ConfigError("box set needs SIDE:MASK:DEPTH, e.g. box:3:111101111:4");
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("unknown set kind: " + kind);
}

inline int next_power_of_two(int v) {
  int p = 1;
  while (p < v) p *= 2;
  return p;
}

/// Fully resolved run configuration. Precedence: built-in defaults < --config file < flags.
struct RunConfig {
  std::string command;
  double gamma = 1.0;
  std::uint64_t seed = 1;
  int resolution = 0;  // 0: per-command default
  int cutoff = 0;      // 0: smallest power of two meeting pi*M/n >= 50 (sample-field: resolution)
  std::vector<double> scales;
  long replicates = 0;
  std::string set = "segment:0.25,0.5,0.75,0.5";
  std::string root_mode = "measure";
  std::string out = "out";
  std::vector<std::string> checks;
  std::string kind = "spectral";
  double overlay_delta = 0.0;
  int roots_per_field = 500;
  int max_n = 10;
  unsigned threads = 1;

  json to_json() const {
    return {{"command", command},        {"gamma", gamma},         {"seed", seed},
            {"resolution", resolution},  {"cutoff", cutoff},       {"scales", scales},
            {"replicates", replicates},  {"set", set},             {"root_mode", root_mode},
            {"out", out},                {"checks", checks},       {"kind", kind},
            {"overlay_delta", overlay_delta}, {"roots_per_field", roots_per_field},
            {"max_n", max_n}};
  }

  // What determines the results: everything except where they are written.
  json identity() const {
    json j = to_json();
    j.erase("out");
    return j;
  }
};

inline void resolve_defaults(RunConfig& c) {
  const std::string& cmd = c.command;
  if (c.resolution == 0) c.resolution = cmd == "quantum-exponent" ? 512 : 256;
  if (c.cutoff == 0) {
    if (cmd == "sample-field")
      c.cutoff = c.resolution;
    else
      c.cutoff = next_power_of_two(cutoff_for_radius(1.0 / c.resolution));
  }
  if (c.scales.empty()) {
    if (cmd == "euclid-exponent") c.scales = parse_scales("2^-4..2^-9");
    if (cmd == "quantum-exponent") c.scales = parse_scales("2^-7..2^-11");
  }
  if (c.replicates == 0) {
    if (cmd == "euclid-exponent") c.replicates = 1'000'000;
    if (cmd == "quantum-exponent") c.replicates = 200;
  }
  if (cmd == "verify" && c.checks.empty()) c.checks = {"kpz-fixed-points", "kpz-analytic", "count-quads"};
}

inline void validate(const RunConfig& c) {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  need(std::find(commands().begin(), commands().end(), c.command) != commands().end(), "unknown command " + c.command);
  need(c.gamma >= 0.0 && c.gamma < 2.0, "gamma must lie in [0, 2)");
  need(c.resolution >= 2, "resolution must be >= 2");
  need(c.cutoff >= 1, "cutoff must be >= 1");
  need(c.replicates >= 0, "replicates must be >= 0");
  need(c.threads >= 1, "threads must be >= 1");
  need(c.kind == "spectral" || c.kind == "dgff", "kind must be spectral or dgff");
  need(c.root_mode == "measure" || c.root_mode == "rooted" || c.root_mode == "both",
       "root-mode must be measure, rooted or both");
  need(c.overlay_delta >= 0.0, "overlay delta must be >= 0");
  need(c.max_n >= 1 && c.max_n <= 2000, "max-n must lie in [1, 2000]");
  if (c.command == "build-measure" || c.command == "quantum-exponent")
    need(is_power_of_two(c.resolution), "resolution must be a power of two");
  if (c.command == "euclid-exponent" || c.command == "quantum-exponent") {
    need(c.scales.size() >= 3, "need at least 3 scales");
    parse_set(c.set);
  }
  if (c.command == "quantum-exponent") need(c.replicates >= 2 && c.roots_per_field >= 1, "need >= 2 replicates");
}

/// Merges a JSON document into the config; unknown keys are rejected.
inline void apply_json(RunConfig& c, const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (auto& [key, v] : j.items()) {
      if (key == "command") c.command = v.get<std::string>();
      else if (key == "gamma") c.gamma = v.get<double>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "resolution") c.resolution = v.get<int>();
      else if (key == "cutoff") c.cutoff = v.get<int>();
      else if (key == "scales") c.scales = v.is_string() ? parse_scales(v.get<std::string>()) : v.get<std::vector<double>>();
      else if (key == "replicates") c.replicates = v.get<long>();
      else if (key == "set") c.set = v.get<std::string>();
      else if (key == "root_mode") c.root_mode = v.get<std::string>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "checks") c.checks = v.get<std::vector<std::string>>();
      else if (key == "kind") c.kind = v.get<std::string>();
      else if (key == "overlay_delta") c.overlay_delta = v.get<double>();
      else if (key == "roots_per_field") c.roots_per_field = v.get<int>();
      else if (key == "max_n") c.max_n = v.get<int>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else throw ConfigError("unknown config key: " + key);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

/// Collects outputs and warnings; the manifest goes last, so a directory holding a
/// manifest is always complete.
class RunContext {
 public:
  RunContext(const RunConfig& cfg, std::ostream& log) : cfg_(cfg), log_(log), start_(std::chrono::steady_clock::now()) {
    dir_ = cfg.out;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    require(!ec && fs::is_directory(dir_), ErrorCode::IoError, "cannot create output directory " + dir_.string());
    fs::remove(dir_ / "manifest.json", ec);
  }

  void write(const std::string& name, const std::string& bytes) {
    write_file_atomic(dir_ / name, bytes);
    outputs_[name] = sha256_hex(bytes);
  }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
  void write_grid(const std::string& name, const std::vector<double>& v) {
    std::string bytes(v.size() * sizeof(double), '\0');
    std::memcpy(bytes.data(), v.data(), bytes.size());
    write(name, bytes);
  }

  Warnings& warnings() { return warnings_; }
  const std::map<std::string, std::string>& outputs() const { return outputs_; }
  std::ostream& log() { return log_; }

  json finish() {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json manifest{{"config", cfg_.to_json()},
                  {"code_version", code_version},
                  {"wall_time_seconds", wall},
                  {"threads", cfg_.threads},
                  {"outputs", outputs_},
                  {"warnings", warnings_}};
    lqg::write_json(dir_ / "manifest.json", manifest);
    return manifest;
  }

 private:
  RunConfig cfg_;
  std::ostream& log_;
  fs::path dir_;
  std::chrono::steady_clock::time_point start_;
  std::map<std::string, std::string> outputs_;
  Warnings warnings_;
};

inline json grid_sidecar(const std::string& what, int side, const RunConfig& cfg, const SeedRecord& seed) {
  return {{"content", what},
          {"format", "float64 little-endian, row-major, value[i*side + j] at x-index i, y-index j"},
          {"side", side},
          {"gamma", cfg.gamma},
          {"cutoff", cfg.cutoff},
          {"seed", seed_json(seed)},
          {"code_version", code_version}};
}

inline int cmd_sample_field(const RunConfig& cfg, RunContext& ctx) {
  const SeedRecord seed{cfg.seed, 0, cfg.kind == "dgff" ? streams::dgff : streams::spectral_field};
  if (cfg.kind == "dgff") {
    const auto f = sample_dgff(cfg.resolution, seed);
    const int side = cfg.resolution + 1;
    ctx.write_grid("field.bin", f.values);
    auto side_json = grid_sidecar("DGFF lattice values at (a/N, b/N), boundary included", side, cfg, seed);
    side_json["N"] = cfg.resolution;
    ctx.write_json("field.json", side_json);
    ctx.write("field.pgm", field_pgm(f.values, side));
  } else {
    const auto f = sample_spectral_gff(cfg.cutoff, seed);
    const Grid g = evaluate_field(f, cfg.resolution);
    ctx.write_grid("field.bin", g.values);
    ctx.write_json("field.json", grid_sidecar("truncated series field at cell centers", g.n, cfg, seed));
    ctx.write("field.pgm", field_pgm(g.values, g.n));
  }
  return Ok;
}

inline int cmd_build_measure(const RunConfig& cfg, RunContext& ctx) {
  const SeedRecord seed{cfg.seed, 0, streams::spectral_field};
  const auto f = sample_spectral_gff(cfg.cutoff, seed);
  const GridMeasure m = build_measure(f, cfg.gamma, cfg.resolution, &ctx.warnings());
  ctx.write_grid("measure.bin", m.masses);
  auto side = grid_sidecar("cell masses eps^{gamma^2/2} exp(gamma h_eps) / n^2, eps = 1/n", m.resolution, cfg, seed);
  side["total_mass"] = m.total;
  ctx.write_json("measure.json", side);
  ctx.write("measure.pgm", log_mass_pgm(m));
  if (cfg.overlay_delta > 0.0) {
    const auto squares = equal_mass_squares(m, cfg.overlay_delta);
    ctx.write("squares.svg", squares_svg(squares, 512));
    ctx.write_json("squares.json", {{"delta", cfg.overlay_delta},
                                    {"count", squares.size()},
                                    {"log2_side_variance", square_size_variance(squares)}});
  }
  return Ok;
}

inline std::string fit_label(const std::string& base, RootMode m) { return base + "_" + to_string(m) + ".csv"; }

inline int cmd_euclid(const RunConfig& cfg, RunContext& ctx) {
  const FractalSet K = parse_set(cfg.set);
  EuclideanConfig ec;
  ec.scales = cfg.scales;
  ec.samples = static_cast<std::size_t>(cfg.replicates);
  ec.max_samples = std::max<std::size_t>(ec.samples, 64'000'000);
  ec.seed = cfg.seed;
  ec.threads = cfg.threads;
  const auto fit = euclidean_exponent(K, ec);
  ctx.write("exponent.csv", exponent_csv(fit));
  auto summary = exponent_summary(fit, cfg.identity());
  summary["expected"] = K.expected_exponent();
  ctx.write_json("summary.json", summary);
  ctx.log() << summary.dump() << "\n";
  return Ok;
}

inline int cmd_quantum(const RunConfig& cfg, RunContext& ctx) {
  const FractalSet K = parse_set(cfg.set);
  QuantumConfig qc;
  qc.gamma = cfg.gamma;
  qc.deltas = cfg.scales;
  qc.replicates = static_cast<int>(cfg.replicates);
  qc.roots_per_field = cfg.roots_per_field;
  qc.resolution = cfg.resolution;
  qc.cutoff = cfg.cutoff;
  qc.seed = cfg.seed;
  qc.threads = cfg.threads;
  std::vector<RootMode> modes;
  if (cfg.root_mode != "rooted") modes.push_back(RootMode::SampleFromMeasure);
  if (cfg.root_mode != "measure") modes.push_back(RootMode::RootedDensity);
  const auto results = quantum_exponents(K, qc, modes, &ctx.warnings());
  json summary{{"kpz_prediction", cfg.gamma > 0.0 ? kpz_inverse(cfg.gamma, K.expected_exponent()) : K.expected_exponent()},
               {"modes", json::array()}};
  for (const auto& r : results) {
    ctx.write(fit_label("exponent", r.mode), exponent_csv(r.fit));
    auto s = exponent_summary(r.fit, cfg.identity());
    s["mode"] = to_string(r.mode);
    s["discarded"] = r.discarded;
    s["attempted"] = r.attempted;
    summary["modes"].push_back(s);
  }
  ctx.write_json("summary.json", summary);
  ctx.log() << summary.dump() << "\n";
  return Ok;
}

inline int cmd_kpz_table(const RunConfig& cfg, RunContext& ctx) {
  std::vector<std::pair<std::string, double>> gammas{{"pure-gravity", presets::pure_gravity}, {"ising", presets::ising}};
  gammas.push_back({"custom", cfg.gamma});
  std::string csv = "label,gamma,x,delta,beta,x_roundtrip\n";
  for (const auto& [label, g] : gammas)
    for (int i = 0; i <= 20; ++i) {
      const double x = i / 20.0;
      const double d = kpz_inverse(g, x);
      csv += label + "," + format_double(g) + "," + format_double(x) + "," + format_double(d) + "," +
             format_double(beta_of_x(g, x)) + "," + format_double(kpz_formula(g, d)) + "\n";
    }
  ctx.write("kpz.csv", csv);
  return Ok;
}

inline int cmd_count_quads(const RunConfig& cfg, RunContext& ctx) {
  std::string csv = "n,count\n";
  for (int n = 1; n <= cfg.max_n; ++n) csv += std::to_string(n) + "," + count_quadrangulations(n).str() + "\n";
  ctx.write("quads.csv", csv);
  return Ok;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Runs representative commands twice with one thread and once with two threads and
/// compares every output checksum.
inline CheckResult reproducibility_check(const CheckOptions& opt) {
  CheckResult res{"reproducibility", {}, {}};
  const fs::path base = fs::temp_directory_path() / ("lqg-repro-" + std::to_string(opt.seed) + "-" +
                                                     std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  const std::string seed = std::to_string(opt.seed);
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs{
      {"sample-field spectral", {"sample-field", "--resolution", "128", "--cutoff", "128"}},
      {"sample-field dgff", {"sample-field", "--kind", "dgff", "--resolution", "128"}},
      {"build-measure", {"build-measure", "--resolution", "128", "--gamma", "1.5", "--overlay-delta", "0.001"}},
      {"euclid-exponent", {"euclid-exponent", "--replicates", "200000", "--scales", "2^-3..2^-6"}},
      {"quantum-exponent",
       {"quantum-exponent", "--resolution", "64", "--cutoff", "1024", "--replicates", "6", "--roots-per-field", "100",
        "--scales", "2^-4..2^-6", "--root-mode", "both", "--set", "segment:0.3,0.5,0.7,0.5"}},
  };
  std::ostringstream sink;
  int idx = 0;
  for (const auto& [label, argv] : runs) {
    std::vector<json> manifests;
    bool ok = true;
    for (const char* threads : {"1", "1", "2"}) {
      const fs::path dir = base / (std::to_string(idx++));
      auto a = argv;
      a.insert(a.end(), {"--seed", seed, "--threads", threads, "--out", dir.string()});
      const int code = run(a, sink, sink);
      if (code != Ok) {
        ok = false;
        res.notes.push_back(label + " exited with code " + std::to_string(code));
        break;
      }
      manifests.push_back(json::parse(read_file(dir / "manifest.json")));
    }
    bool same = ok;
    if (ok)
      for (const auto& m : manifests) same = same && m["outputs"] == manifests[0]["outputs"] && !m["outputs"].empty();
    res.rows.push_back({label + ": checksums identical (2 runs x 1 thread, 1 run x 2 threads)", 1.0, same ? 1.0 : 0.0,
                        0.0, 0.0, "all output checksums equal", same});
  }
  std::error_code ec;
  fs::remove_all(base, ec);
  return res;
}

inline int cmd_verify(const RunConfig& cfg, RunContext& ctx) {
  std::vector<CheckInfo> selected;
  const CheckInfo repro{"reproducibility", "identical checksums across runs and thread counts", reproducibility_check};
  for (const auto& name : cfg.checks) {
    if (name == "all") {
      for (const auto& c : check_registry()) selected.push_back(c);
      selected.push_back(repro);
    } else if (name == "reproducibility") {
      selected.push_back(repro);
    } else if (const CheckInfo* c = find_check(name)) {
      selected.push_back(*c);
    } else {
      throw ConfigError("unknown check: " + name);
    }
  }
  CheckOptions opt{cfg.seed, cfg.threads, cfg.replicates};
  std::string csv = "check,row,target,estimate,stderr,tolerance,rule,verdict\n";
  json report = json::array();
  bool all = true;
  for (const auto& info : selected) {
    CheckResult r;
    try {
      r = info.run(opt);
    } catch (const Error& e) {
      r = CheckResult{info.name, {}, {std::string("error: ") + e.what()}};
    }
    all = all && r.pass();
    json rows = json::array();
    for (const auto& row : r.rows) {
      auto quoted = [](std::string s) {
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
      };
      csv += info.name + "," + quoted(row.label) + "," + format_double(row.target) + "," + format_double(row.estimate) +
             "," + format_double(row.stderr_value) + "," + format_double(row.tolerance) + "," + quoted(row.rule) + "," +
             (row.pass ? "PASS" : "FAIL") + "\n";
      rows.push_back({{"label", row.label},
                      {"target", row.target},
                      {"estimate", row.estimate},
                      {"stderr", row.stderr_value},
                      {"tolerance", row.tolerance},
                      {"rule", row.rule},
                      {"pass", row.pass}});
    }
    report.push_back({{"check", info.name}, {"pass", r.pass()}, {"rows", rows}, {"notes", r.notes}});
    ctx.log() << (r.pass() ? "PASS " : "FAIL ") << info.name << "\n";
  }
  ctx.write("verify.csv", csv);
  ctx.write_json("verify.json", report);
  return all ? Ok : CheckFailure;
}

inline json error_json(const std::string& code, const std::string& message, int exit_code) {
  return {{"error", {{"code", code}, {"message", message}}}, {"exit_code", exit_code}};
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Liouville quantum gravity and KPZ experiment driver", "lqg"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(code_version));

  // Raw flag values; only flags actually given override the config file.
  struct Flags {
    std::string config;
    double gamma = 0;
    std::uint64_t seed = 0;
    int resolution = 0, cutoff = 0, roots = 0, max_n = 0;
    long replicates = 0;
    unsigned threads = 1;
    double overlay = 0;
    std::string scales, set, root_mode, outdir, checks, kind;
  } f;
  std::map<std::string, CLI::App*> subs;
  static const std::map<std::string, std::string> about{
      {"sample-field", "sample a spectral GFF or a DGFF and write the grid"},
      {"build-measure", "build the discretized Liouville measure of one field"},
      {"euclid-exponent", "Monte Carlo Euclidean scaling exponent of a set"},
      {"quantum-exponent", "quantum scaling exponent from quantum balls"},
      {"verify", "run named checks and write a verdict table"},
      {"kpz-table", "tabulate the KPZ relation for preset and custom gamma"},
      {"count-quads", "exact counts of rooted planar quadrangulations"}};
  for (const auto& name : commands()) {
    CLI::App* s = app.add_subcommand(name, about.at(name));
    s->add_option("--config", f.config, "JSON config file (flags override its keys)");
    s->add_option("--gamma", f.gamma, "Liouville parameter gamma in [0, 2)");
    s->add_option("--seed", f.seed, "64-bit master seed");
    s->add_option("--resolution", f.resolution, "grid side n (DGFF: N)");
    s->add_option("--cutoff", f.cutoff, "spectral cutoff M");
    s->add_option("--scales", f.scales, "dyadic scales, e.g. 2^-7..2^-11 or 0.1,0.05");
    s->add_option("--replicates", f.replicates, "replicates / samples");
    s->add_option("--set", f.set, "set K: segment:x0,y0,x1,y1 | point:x,y | full | box:SIDE:MASK:DEPTH");
    s->add_option("--root-mode", f.root_mode, "measure | rooted | both");
    s->add_option("--out", f.outdir, "output directory");
    s->add_option("--checks", f.checks, "comma-separated check names, or all");
    s->add_option("--threads", f.threads, "worker threads");
    s->add_option("--kind", f.kind, "sample-field: spectral | dgff");
    s->add_option("--overlay-delta", f.overlay, "build-measure: emit equal-mass squares at this delta");
    s->add_option("--roots-per-field", f.roots, "quantum-exponent: centers per field");
    s->add_option("--max-n", f.max_n, "count-quads: largest n");
    subs[name] = s;
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return Ok;
  } catch (const CLI::CallForVersion&) {
    out << code_version << "\n";
    return Ok;
  } catch (const CLI::ParseError& e) {
    err << error_json("InvalidConfig", e.what(), InvalidConfig).dump() << "\n";
    return InvalidConfig;
  }

  RunConfig cfg;
  try {
    CLI::App* s = app.get_subcommands().front();
    cfg.command = s->get_name();
    if (!f.config.empty()) {
      json j;
      try {
        j = json::parse(read_file(f.config));
      } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
      if (j.contains("command") && j["command"] != cfg.command) throw ConfigError("config command does not match");
      apply_json(cfg, j);
    }
    auto given = [&](const char* name) { return s->count(name) > 0; };
    if (given("--gamma")) cfg.gamma = f.gamma;
    if (given("--seed")) cfg.seed = f.seed;
    if (given("--resolution")) cfg.resolution = f.resolution;
    if (given("--cutoff")) cfg.cutoff = f.cutoff;
    if (given("--scales")) cfg.scales = parse_scales(f.scales);
    if (given("--replicates")) cfg.replicates = f.replicates;
    if (given("--set")) cfg.set = f.set;
    if (given("--root-mode")) cfg.root_mode = f.root_mode;
    if (given("--out")) cfg.out = f.outdir;
    if (given("--threads")) cfg.threads = f.threads;
    if (given("--kind")) cfg.kind = f.kind;
    if (given("--overlay-delta")) cfg.overlay_delta = f.overlay;
    if (given("--roots-per-field")) cfg.roots_per_field = f.roots;
    if (given("--max-n")) cfg.max_n = f.max_n;
    if (given("--checks")) {
      cfg.checks.clear();
      std::stringstream ss(f.checks);
      std::string t;
      while (std::getline(ss, t, ','))
        if (!t.empty()) cfg.checks.push_back(t);
    }
    resolve_defaults(cfg);
    validate(cfg);
    if (cfg.command == "verify")
      for (const auto& c : cfg.checks)
        if (c != "all" && c != "reproducibility" && !find_check(c)) throw ConfigError("unknown check: " + c);
  } catch (const ConfigError& e) {
    err << error_json("InvalidConfig", e.what(), InvalidConfig).dump() << "\n";
    return InvalidConfig;
  } catch (const Error& e) {
    err << error_json(std::string(to_string(e.code())), e.what(), InvalidConfig).dump() << "\n";
    return InvalidConfig;
  }

  try {
    RunContext ctx(cfg, out);
    int code = Ok;
    const std::string& c = cfg.command;
    if (c == "sample-field") code = cmd_sample_field(cfg, ctx);
    else if (c == "build-measure") code = cmd_build_measure(cfg, ctx);
    else if (c == "euclid-exponent") code = cmd_euclid(cfg, ctx);
    else if (c == "quantum-exponent") code = cmd_quantum(cfg, ctx);
    else if (c == "verify") code = cmd_verify(cfg, ctx);
    else if (c == "kpz-table") code = cmd_kpz_table(cfg, ctx);
    else if (c == "count-quads") code = cmd_count_quads(cfg, ctx);
    ctx.finish();
    return code;
  } catch (const ConfigError& e) {
    err << error_json("InvalidConfig", e.what(), InvalidConfig).dump() << "\n";
    return InvalidConfig;
  } catch (const Error& e) {
    err << error_json(std::string(to_string(e.code())), e.what(), RuntimeFailure).dump() << "\n";
    return RuntimeFailure;
  } catch (const std::exception& e) {
    err << error_json("RuntimeError", e.what(), RuntimeFailure).dump() << "\n";
    return RuntimeFailure;
  }
}

}  // namespace lqg::cli
