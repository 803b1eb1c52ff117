#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "gelfond/debruijn.hpp"
#include "gelfond/records_io.hpp"
#include "gelfond/sweep.hpp"
#include "gelfond/verify.hpp"
#include "selftest.hpp"

using namespace gelfond;
using nlohmann::json;

namespace {

/// "5/2", "4", "2.5".
double parse_constant(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw CLI::ValidationError("--tail-constant", "bad number " + text);
    return v;
  }
  const double num = std::stod(text.substr(0, slash));
  const double den = std::stod(text.substr(slash + 1));
  if (den == 0) throw CLI::ValidationError("--tail-constant", "zero denominator");
  return num / den;
}

struct RangeOptions {
  TripleRange range;
  std::string tail_constant = "4";
  int base_level = kDefaultBaseLevel;
  bool no_mirror = false;

  void attach(CLI::App* app) {
    app->add_option("--d-min", range.d_min, "smallest truncation depth d")->capture_default_str();
    app->add_option("--d-max", range.d_max, "largest truncation depth d")->capture_default_str();
    app->add_option("--dprime-max", range.dprime_max, "largest tail depth d'")->capture_default_str();
    app->add_option("--n-max", range.n_max, "largest graph order N")->capture_default_str();
    app->add_option("--tail-constant", tail_constant,
                    "constant in the Haar tail bound (4, or 5/2 as published)")
        ->capture_default_str();
    app->add_option("--base-level", base_level, "integration grid level")->capture_default_str();
    app->add_flag("--no-mirror", no_mirror, "never fall back to the potential of 1 - c");
  }

  VerifyConfig config() const {
    VerifyConfig vc;
    vc.tail_constant = parse_constant(tail_constant);
    vc.base_level = base_level;
    vc.mirror = !no_mirror;
    return vc;
  }
};

json opt_number(const std::optional<double>& v) { return v ? json(format_double(*v)) : json(nullptr); }

json record_json(const VerificationRecord& r) {
  json j;
  j["c"] = r.c.to_string();
  j["status"] = to_string(r.status);
  if (r.triple) {
    j["triple"] = {r.triple->d, r.triple->dprime, r.triple->N};
  } else {
    j["triple"] = nullptr;
  }
  j["cycle_code"] = r.cycle_code ? json(r.cycle_code->to_string()) : json(nullptr);
  j["period"] = r.period;
  j["beta"] = opt_number(r.beta);
  j["delta"] = opt_number(r.delta);
  j["gap"] = format_double(r.gap);
  j["threshold"] = format_double(r.threshold);
  j["epsilon"] = format_double(r.epsilon);
  j["mrs_bound"] = format_double(r.mrs_bound);
  j["iterations"] = r.iterations;
  j["runtime_ms"] = format_double(r.runtime_ms);
  j["mirrored"] = r.mirrored;
  j["rejected_triples"] = r.rejected_triples;
  j["skipped_pairs"] = r.skipped_pairs;
  return j;
}

void write_json(const std::string& path, const json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << j.dump(2) << '\n';
}

void progress_line(const VerificationRecord& r, std::size_t done, std::size_t total) {
  std::fprintf(stderr, "[%zu/%zu] %s %s", done, total, r.c.to_string().c_str(), to_string(r.status).c_str());
  if (r.cycle_code) std::fprintf(stderr, " %s", r.cycle_code->to_string().c_str());
  std::fprintf(stderr, " (%.1f s)\n", r.runtime_ms / 1000);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified Gelfond exponents of weighted Thue-Morse sequences"};
  app.require_subcommand(1);

  // certify
  auto* certify_cmd = app.add_subcommand("certify", "certify one dyadic parameter c");
  std::string c_text;
  RangeOptions certify_opts;
  bool verbose = false;
  certify_cmd->add_option("--c", c_text, "parameter NUM/DEN with DEN a power of two")->required();
  certify_opts.attach(certify_cmd);
  certify_cmd->add_flag("-v,--verbose", verbose, "log every triple to stderr");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "certify every c = i/2^L");
  SweepConfig sweep_cfg;
  RangeOptions sweep_opts;
  std::string sweep_out = "records.csv", sweep_summary_path = "summary.json", checkpoint;
  bool timing = false;
  sweep_cmd->add_option("--L", sweep_cfg.L, "grid level")->capture_default_str();
  sweep_opts.attach(sweep_cmd);
  sweep_cmd->add_option("--out", sweep_out, "records CSV")->capture_default_str();
  sweep_cmd->add_option("--summary", sweep_summary_path, "analysis JSON")->capture_default_str();
  sweep_cmd->add_option("--checkpoint", checkpoint, "resumable progress file");
  sweep_cmd->add_option("--workers", sweep_cfg.workers, "worker threads (default: GELFOND_WORKERS or all cores)");
  sweep_cmd->add_flag("--timing", timing, "keep runtimes in the CSV (otherwise written as 0)");

  // zoom
  auto* zoom_cmd = app.add_subcommand("zoom", "certify every level-L point in a window");
  SweepConfig zoom_cfg;
  RangeOptions zoom_opts;
  std::vector<double> window;
  std::string zoom_out = "zoom.csv", zoom_report = "-", zoom_checkpoint;
  zoom_cmd->add_option("--window", window, "interval A B")->expected(2)->required();
  zoom_cmd->add_option("--L", zoom_cfg.zoom_level, "refined level")->capture_default_str();
  zoom_cmd->add_option("--base-L", zoom_cfg.L, "level of the original sweep")->capture_default_str();
  zoom_opts.attach(zoom_cmd);
  zoom_cmd->add_option("--out", zoom_out, "records CSV")->capture_default_str();
  zoom_cmd->add_option("--report", zoom_report, "report JSON (- for stdout)")->capture_default_str();
  zoom_cmd->add_option("--checkpoint", zoom_checkpoint, "resumable progress file");
  zoom_cmd->add_option("--workers", zoom_cfg.workers, "worker threads");

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "period statistics of a records CSV");
  std::string analyze_in, analyze_out = "-";
  analyze_cmd->add_option("--in", analyze_in, "records CSV")->required();
  analyze_cmd->add_option("--out", analyze_out, "analysis JSON (- for stdout)")->capture_default_str();

  // selftest
  auto* selftest_cmd = app.add_subcommand("selftest", "sequence identities and algorithm oracles");
  std::vector<std::string> only;
  selftest_cmd->add_option("--only", only, "run only the named suites");

  // dump-graph
  auto* dump_cmd = app.add_subcommand("dump-graph", "write the weighted graph G_N");
  std::string dump_c, dump_out = "-";
  int dump_d = 3, dump_dp = 3, dump_N = 10, dump_base = kDefaultBaseLevel;
  bool dump_no_mirror = false;
  dump_cmd->add_option("--c", dump_c, "parameter NUM/DEN")->required();
  dump_cmd->add_option("--d", dump_d)->capture_default_str();
  dump_cmd->add_option("--dprime", dump_dp)->capture_default_str();
  dump_cmd->add_option("--N", dump_N)->capture_default_str();
  dump_cmd->add_option("--base-level", dump_base)->capture_default_str();
  dump_cmd->add_flag("--no-mirror", dump_no_mirror);
  dump_cmd->add_option("--out", dump_out, "output file (- for stdout)")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*certify_cmd) {
      const auto c = DyadicRational::parse(c_text);
      CertifyObserver observer;
      if (verbose) {
        observer.on_triple = [](const Triple& t, const TripleCheck& k) {
          std::fprintf(stderr, "(%d,%d,%d) gap=%.6g required=%.6g%s%s\n", t.d, t.dprime, t.N, k.gap,
                       k.required, k.exact ? "" : " (bounded)", k.passed ? " PASS" : "");
        };
        observer.on_skip = [](int d, int dp) {
          std::fprintf(stderr, "(%d,%d) skipped: tail condition fails for c and 1-c\n", d, dp);
        };
      }
      const auto record = certify(c, certify_opts.range, certify_opts.config(), observer);
      std::cout << record_json(record).dump(2) << '\n';
      return 0;
    }

    if (*sweep_cmd) {
      sweep_cfg.range = sweep_opts.range;
      sweep_cfg.verify = sweep_opts.config();
      if (!checkpoint.empty()) sweep_cfg.checkpoint = checkpoint;
      sweep_cfg.progress = progress_line;
      const auto records = run_sweep(sweep_cfg);
      write_csv(std::filesystem::path(sweep_out), records, timing);
      write_json(sweep_summary_path, sweep_summary(sweep_cfg, analyze(records)));
      return 0;
    }

    if (*zoom_cmd) {
      zoom_cfg.range = zoom_opts.range;
      zoom_cfg.verify = zoom_opts.config();
      zoom_cfg.window = std::make_pair(window[0], window[1]);
      if (!zoom_checkpoint.empty()) zoom_cfg.checkpoint = zoom_checkpoint;
      zoom_cfg.progress = progress_line;
      const auto report = zoom(zoom_cfg);
      write_csv(std::filesystem::path(zoom_out), report.records);
      json j;
      j["schema_version"] = kRecordSchemaVersion;
      j["config"] = zoom_cfg.to_json();
      j["config_hash"] = zoom_cfg.hash();
      j["points"] = report.records.size();
      j["all_testable"] = report.all_testable;
      j["untestable"] = json::array();
      for (const auto& c : report.untestable) j["untestable"].push_back(c.to_string());
      j["isolated"] = json::array();
      for (const auto& c : report.isolated) j["isolated"].push_back(c.to_string());
      write_json(zoom_report, j);
      return 0;
    }

    if (*analyze_cmd) {
      write_json(analyze_out, to_json(analyze(read_csv(std::filesystem::path(analyze_in)))));
      return 0;
    }

    if (*selftest_cmd) {
      bool all = true;
      for (const auto& suite : selftest::default_suites()) {
        if (!only.empty() && std::find(only.begin(), only.end(), suite.name) == only.end()) continue;
        const auto r = suite.run();
        all = all && r.passed;
        std::printf("%s %s: %s (%.1f s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(),
                    r.seconds);
        std::fflush(stdout);
      }
      return all ? 0 : 1;
    }

    if (*dump_cmd) {
      const auto c = DyadicRational::parse(dump_c);
      const auto resolved = resolve_spec(c, dump_d, dump_dp, !dump_no_mirror);
      if (!resolved) throw std::invalid_argument("tail condition fails at this (d, d')");
      const auto cells = integrate_cylinders(resolved->spec, dump_base, dump_N);
      const auto graph = build_graph(haar_average(cells, dump_N));
      if (dump_out == "-") {
        write_graph_dump(std::cout, graph);
      } else {
        std::ofstream os(dump_out, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + dump_out);
        write_graph_dump(os, graph);
      }
      if (resolved->mirrored) std::fprintf(stderr, "note: weights are those of 1 - c\n");
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
