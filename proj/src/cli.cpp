// SPDX-License-Identifier: Apache-2.0

#include "cma/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ostream>

#include "cma/config.hpp"
#include "cma/errors.hpp"
#include "cma/io.hpp"
#include "cma/ma_solver.hpp"
#include "cma/verification.hpp"

namespace cma::cli {

namespace {

namespace fs = std::filesystem;

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

class ThreadScope {
 public:
  explicit ThreadScope(int threads) : saved_(num_threads()) { set_num_threads(threads); }
  ~ThreadScope() { set_num_threads(saved_); }
  ThreadScope(const ThreadScope&) = delete;
  ThreadScope& operator=(const ThreadScope&) = delete;

 private:
  int saved_;
};

}  // namespace

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  if (args.threads < 1) {
    err << "error: --threads must be >= 1\n";
    return exit_code::kUsage;
  }
  Stopwatch clock;
  RunManifest manifest;
  manifest.version = version_string();

  RunConfig config;
  Problem problem{HermitianField::identity(Grid(1, 8)), PeriodicScalarField::zeros(Grid(1, 8)), {}};
  try {
    config = load_run_config(args.config);
    problem = build_problem(config);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kNoInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kUsage;
  }
  manifest.config_echo = config.echo;
  try {
    manifest.inputs.push_back({fs::absolute(args.config).string(), sha256_file(args.config)});
    for (const fs::path& p : problem.inputs) manifest.inputs.push_back({fs::absolute(p).string(), sha256_file(p)});
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kNoInput;
  }
  manifest.timings.emplace_back("setup", clock.lap());

  std::optional<ContinuityResult> solved;
  try {
    const ThreadScope threads(args.threads);
    solved = continuity_solve(problem.F, problem.background, config.solver);
  } catch (const Error& e) {
    err << "error: solve failed: " << e.what() << "\n";
    return exit_code::kSoftware;
  }
  const ContinuityResult& result = *solved;
  manifest.timings.emplace_back("solve", clock.lap());
  for (const std::string& w : result.warnings) err << "warning: " << w << "\n";

  try {
    fs::create_directories(args.out);
    const fs::path phi_path = args.out / "phi.cmaf";
    const fs::path metric_path = args.out / "metric.cmmf";
    const fs::path trace_path = args.out / "trace.json";
    write_field(phi_path, result.phi);
    write_metric(metric_path, metric_from_potential(problem.background, result.phi));
    write_trace(trace_path, result.trace);
    for (const fs::path& p : {phi_path, metric_path, trace_path}) manifest.outputs.push_back(fs::absolute(p).string());
    manifest.timings.emplace_back("write", clock.lap());
    write_text_file(args.out / "manifest.json", manifest.to_json());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kIoError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kIoError;
  }

  const double residual = result.trace.empty() ? NAN : result.trace.back().residual_sup;
  if (!result.converged()) {
    err << "error: continuation step fell below t_step_min; last accepted t = " << result.last_good_t << "\n";
    out << "status: step_underflow\nlast_good_t: " << result.last_good_t << "\n";
    return exit_code::kStepUnderflow;
  }
  out << "status: converged\nsteps: " << result.trace.size() << "\nresidual_sup: " << residual
      << "\nout: " << args.out.string() << "\n";
  return exit_code::kOk;
}

int cmd_verify(const std::string& suite, const std::optional<fs::path>& out_dir, std::ostream& out,
               std::ostream& err) {
  if (!is_suite_name(suite)) {
    err << "error: unknown suite '" << suite << "'; expected all";
    for (const std::string& s : suite_names()) err << ", " << s;
    err << "\n";
    return exit_code::kUsage;
  }
  SuiteReport report;
  try {
    report = run_suite(suite);
  } catch (const Error& e) {
    err << "error: suite aborted: " << e.what() << "\n";
    return exit_code::kSoftware;
  }
  const std::string json = report.to_json();
  out << json << "\n";
  for (const CheckResult& c : report.checks) {
    err << (c.pass ? "PASS " : "FAIL ") << c.name << "  measured=" << c.measured << "  threshold=" << c.threshold
        << "\n";
  }
  if (out_dir) {
    try {
      fs::create_directories(*out_dir);
      write_text_file(*out_dir / ("verify_" + suite + ".json"), json + "\n");
    } catch (const fs::filesystem_error& e) {
      err << "error: " << e.what() << "\n";
      return exit_code::kIoError;
    } catch (const IoError& e) {
      err << "error: " << e.what() << "\n";
      return exit_code::kIoError;
    }
  }
  return report.pass() ? exit_code::kOk : exit_code::kFailed;
}

int cmd_report(const fs::path& trace, const std::optional<fs::path>& csv, std::ostream& out, std::ostream& err) {
  const fs::path path = fs::is_directory(trace) ? trace / "trace.json" : trace;
  ContinuityTrace steps;
  try {
    steps = read_trace(path);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kNoInput;
  }
  out << trace_table(steps);
  if (csv) {
    try {
      write_text_file(*csv, trace_to_csv(steps));
    } catch (const IoError& e) {
      err << "error: " << e.what() << "\n";
      return exit_code::kIoError;
    }
  }
  return exit_code::kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Complex Monge-Ampere solver on flat tori"};
  app.require_subcommand(1);

  SolveArgs solve;
  std::string suite;
  std::string trace;
  std::string csv;
  std::string verify_out;
  int threads = 1;

  auto* s = app.add_subcommand("solve", "Solve det(g + ddbar phi) = C e^F det g by continuation");
  s->add_option("--config", solve.config, "JSON configuration file")->required();
  s->add_option("--out", solve.out, "Output directory")->capture_default_str();
  s->add_option("--threads", solve.threads, "Transform threads")->capture_default_str();

  auto* v = app.add_subcommand("verify", "Run a verification suite");
  v->add_option("--suite", suite, "Suite name or 'all'")->required();
  v->add_option("--out", verify_out, "Directory for the JSON report");
  v->add_option("--threads", threads, "Must be 1; suites run single-threaded")->capture_default_str();

  auto* r = app.add_subcommand("report", "Print a continuation trace");
  r->add_option("trace", trace, "trace.json or a solve output directory")->required();
  r->add_option("--csv", csv, "Also write the trace as CSV");
  r->add_option("--threads", threads, "Ignored unless 1")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return exit_code::kUsage;
  }

  if (s->parsed()) return cmd_solve(solve, out, err);
  if (threads != 1) {
    err << "error: --threads > 1 is only allowed for solve\n";
    return exit_code::kUsage;
  }
  if (v->parsed()) {
    return cmd_verify(suite, verify_out.empty() ? std::nullopt : std::optional<fs::path>(verify_out), out, err);
  }
  return cmd_report(trace, csv.empty() ? std::nullopt : std::optional<fs::path>(csv), out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"cma"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace cma::cli
