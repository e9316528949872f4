// Acceptance runner: one PASS/FAIL line per criterion. Run with --criterion N for a single
// criterion (each is registered as its own ctest entry) or without arguments for all.
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "cli_app.hpp"

using namespace lqg;

namespace {

struct Criterion {
  int id;
  std::string title;
  double runtime_limit_s;
  std::function<std::vector<CheckResult>(const CheckOptions&)> run;
};

std::function<std::vector<CheckResult>(const CheckOptions&)> checks_named(std::vector<std::string> names) {
  return [names](const CheckOptions& opt) {
    std::vector<CheckResult> out;
    for (const auto& n : names) out.push_back(find_check(n)->run(opt));
    return out;
  };
}

// Repeats verify runs through the command-line driver and compares verdict checksums.
CheckResult verify_repeatability(const CheckOptions& opt) {
  CheckResult res{"verify-repeatability", {}, {}};
  const fs::path base = fs::temp_directory_path() / "lqg-acceptance-verify";
  fs::remove_all(base);
  const std::string checks = "green-diagonal,kpz-analytic,kpz-fixed-points,count-quads,fp-oracle,var-circle-average";
  std::vector<std::string> sums;
  std::ostringstream sink;
  int idx = 0;
  for (const char* threads : {"1", "1", "2"}) {
    const fs::path dir = base / std::to_string(idx++);
    const int code = cli::run({"verify", "--checks", checks, "--replicates", "2000", "--seed", std::to_string(opt.seed),
                               "--threads", threads, "--out", dir.string()},
                              sink, sink);
    if (code != cli::Ok && code != cli::CheckFailure) {
      res.notes.push_back("verify exited with code " + std::to_string(code));
      sums.push_back("error");
      continue;
    }
    const auto m = json::parse(read_file(dir / "manifest.json"));
    sums.push_back(m["outputs"].dump());
  }
  const bool same = sums.size() == 3 && sums[0] == sums[1] && sums[1] == sums[2] && sums[0] != "error";
  res.rows.push_back({"verify outputs identical across 2 runs and 1 vs 2 threads", 1.0, same ? 1.0 : 0.0, 0.0, 0.0,
                      "all output checksums equal", same});
  fs::remove_all(base);
  return res;
}

std::vector<Criterion> criteria() {
  return {
      {1, "Green's function diagonal vs conformal radius", 60, checks_named({"green-diagonal"})},
      {2, "circle-average variance", 600, checks_named({"var-circle-average"})},
      {3, "circle-average Brownian motion", 900, checks_named({"bm-circle-process"})},
      {4, "DGFF exactness and log N growth", 600, checks_named({"dgff-exact"})},
      {5, "Liouville measure first and second moments", 1200, checks_named({"measure-moments"})},
      {6, "coupled L2 Cauchy differences", 1200, checks_named({"l2-cauchy"})},
      {7, "rooted ball scaling and ratio test", 1800, checks_named({"rooted-ball-scaling"})},
      {8, "first-passage oracle", 600, checks_named({"fp-oracle"})},
      {9, "KPZ analytic values and round trips", 1, checks_named({"kpz-analytic", "kpz-fixed-points"})},
      {10, "end-to-end KPZ on a segment", 7200, checks_named({"kpz-end-to-end"})},
      {11, "quadrangulation counts", 1, checks_named({"count-quads"})},
      {12, "reproducibility",
       600,
       [](const CheckOptions& opt) {
         return std::vector<CheckResult>{cli::reproducibility_check(opt), verify_repeatability(opt)};
       }},
  };
}

void print_rows(const CheckResult& r) {
  for (const auto& row : r.rows)
    std::printf("    %s %-62s target=%.10g estimate=%.10g stderr=%.3g tol=%.3g\n", row.pass ? "ok  " : "FAIL",
                row.label.c_str(), row.target, row.estimate, row.stderr_value, row.tolerance);
  for (const auto& n : r.notes) std::printf("    note: %s\n", n.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  CheckOptions opt;
  app.add_option("--criterion", only, "run a single criterion (1-12)");
  app.add_option("--threads", opt.threads, "worker threads");
  CLI11_PARSE(app, argc, argv);

  bool all_pass = true;
  bool found = false;
  for (const auto& c : criteria()) {
    if (only != 0 && c.id != only) continue;
    found = true;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<CheckResult> results;
    std::string error;
    try {
      results = c.run(opt);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = error.empty() && !results.empty();
    for (const auto& r : results) pass = pass && r.pass();
    const bool in_time = secs <= c.runtime_limit_s;
    pass = pass && in_time;
    all_pass = all_pass && pass;
    std::printf("%s criterion %d: %s (%.1f s, limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                c.runtime_limit_s);
    for (const auto& r : results) {
      std::printf("  [%s] %s\n", r.pass() ? "pass" : "fail", r.name.c_str());
      print_rows(r);
    }
    if (!error.empty()) std::printf("  error: %s\n", error.c_str());
    if (!in_time) std::printf("  runtime limit exceeded\n");
    std::fflush(stdout);
  }
  if (!found) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 3;
  }
  return all_pass ? 0 : 1;
}
