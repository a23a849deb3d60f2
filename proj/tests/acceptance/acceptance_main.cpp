// Runs every acceptance criterion and prints one PASS/FAIL line each.
// The pipeline criteria drive the installed CLI as a subprocess.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cervix_cad/eval.hpp"
#include "properties.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

struct Cli {
  std::string exe;
  fs::path log;

  int operator()(const std::vector<std::string>& args) const {
    std::string cmd = quote(exe);
    for (const auto& a : args) cmd += " " + quote(a);
    cmd += " >>" + quote(log.string()) + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : 128;
  }
};

cervix::MetricsReport read_report(const fs::path& tsv, cervix::LabelScheme scheme) {
  return cervix::parse_tsv(testutil::read_text(tsv), scheme);
}

const cervix::MetricValues* find_row(const cervix::MetricsReport& r, int k, cervix::PipelineVariant v) {
  for (const auto& row : r.rows)
    if (row.k == k && row.variant == v) return &row.metrics;
  return nullptr;
}

std::string triple(const cervix::MetricValues& m) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f/%.2f/%.2f", m.specificity, m.sensitivity, m.accuracy);
  return buf;
}

// Synthetic 3-class descriptors through `synth` and `evaluate`.
props::Check end_to_end(const Cli& cli, const fs::path& work) {
  props::Check out;
  const fs::path data = work / "e2e_data";
  const fs::path reports = work / "e2e_reports";
  if (cli({"synth", "--out", data.string(), "--scheme", "ternary", "--seed", "20240601", "--per-class", "300",
           "--separation", "10"}) != 0) {
    out.fail("synth failed");
    return out;
  }
  if (cli({"evaluate", "--features", (data / "rn50.cdc").string(), (data / "rn101.cdc").string(),
           (data / "rn152.cdc").string(), "--manifest", (data / "manifest.tsv").string(), "--k", "5,10", "--seed",
           "20240601", "--out", reports.string()}) != 0) {
    out.fail("evaluate failed");
    return out;
  }
  const auto report = read_report(reports / "metrics.tsv", cervix::LabelScheme::ternary);
  std::string detail;
  for (int k : {5, 10}) {
    const auto* lda = find_row(report, k, cervix::PipelineVariant::fusion_lda);
    const auto* fusion = find_row(report, k, cervix::PipelineVariant::fusion);
    if (!lda || !fusion) {
      out.fail("missing rows for k = " + std::to_string(k));
      continue;
    }
    if (lda->specificity != 100.0 || lda->sensitivity != 100.0 || lda->accuracy != 100.0)
      out.fail("k=" + std::to_string(k) + " fusion+lda " + triple(*lda));
    if (fusion->accuracy < 99.0) out.fail("k=" + std::to_string(k) + " fusion accuracy " + props::fmt(fusion->accuracy));
    detail += (detail.empty() ? "" : "; ") + std::string("k=") + std::to_string(k) + " fusion+lda " + triple(*lda) +
              ", fusion acc " + props::fmt(fusion->accuracy);
  }
  if (out.pass) out.detail = detail;
  return out;
}

// 144 informative dimensions hidden among 6000 noise dimensions, same
// separation as the end-to-end check.
props::Check noise_ordering(const Cli& cli, const fs::path& work) {
  props::Check out;
  const fs::path data = work / "noise_data";
  const fs::path reports = work / "noise_reports";
  if (cli({"synth", "--out", data.string(), "--scheme", "ternary", "--seed", "7", "--per-class", "300",
           "--informative-dims", "144", "--separation", "10"}) != 0) {
    out.fail("synth failed");
    return out;
  }
  if (cli({"evaluate", "--features", (data / "rn50.cdc").string(), (data / "rn101.cdc").string(),
           (data / "rn152.cdc").string(), "--manifest", (data / "manifest.tsv").string(), "--k", "5,10", "--seed", "7",
           "--out", reports.string()}) != 0) {
    out.fail("evaluate failed");
    return out;
  }
  const auto report = read_report(reports / "metrics.tsv", cervix::LabelScheme::ternary);
  std::string detail;
  for (int k : {5, 10}) {
    const auto acc = [&](cervix::PipelineVariant v) {
      const auto* m = find_row(report, k, v);
      return m ? m->accuracy : -1.0;
    };
    const double lda = acc(cervix::PipelineVariant::fusion_lda);
    const double fusion = acc(cervix::PipelineVariant::fusion);
    const double single = std::max({acc(cervix::PipelineVariant::rn50), acc(cervix::PipelineVariant::rn101),
                                    acc(cervix::PipelineVariant::rn152)});
    if (!(lda >= fusion && fusion >= single))
      out.fail("k=" + std::to_string(k) + " fusion+lda " + props::fmt(lda) + ", fusion " + props::fmt(fusion) +
               ", best single " + props::fmt(single));
    detail += (detail.empty() ? "" : "; ") + std::string("k=") + std::to_string(k) + " " + props::fmt(lda) +
              " >= " + props::fmt(fusion) + " >= " + props::fmt(single);
  }
  if (out.pass) out.detail = detail;
  return out;
}

// Two cold `run` invocations from identical configs in separate directories.
props::Check determinism(const Cli& cli, const fs::path& work) {
  props::Check out;
  const std::string config =
      "scheme = ternary\nseed = 11\noutput_dir = out\nsynthetic = true\nsynth_per_class = 60\n"
      "synth_block_dim = 128\nsynth_informative_dims = 48\nsynth_separation = 4\n";
  std::vector<fs::path> dirs = {work / "det_a", work / "det_b"};
  for (const auto& d : dirs) {
    fs::remove_all(d);
    testutil::write_text(d / "exp.cfg", config);
    if (cli({"run", "--config", (d / "exp.cfg").string()}) != 0) {
      out.fail("run failed in " + d.string());
      return out;
    }
  }
  for (const char* name : {"metrics.tsv", "metrics.svg", "metrics.txt"}) {
    const auto a = testutil::read_text(dirs[0] / "out" / "reports" / name);
    const auto b = testutil::read_text(dirs[1] / "out" / "reports" / name);
    if (a.empty() || a != b) out.fail(std::string(name) + " differs");
  }
  if (out.pass) out.detail = "metrics.tsv, metrics.svg and metrics.txt byte-identical";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string cli_path;
  std::string work = "acceptance_work";
  app.add_option("--cli", cli_path, "Path to the cervix-cad executable")->required();
  app.add_option("--work", work, "Scratch directory");
  CLI11_PARSE(app, argc, argv);

  fs::create_directories(work);
  const Cli cli{cli_path, fs::path(work) / "cli.log"};
  fs::remove(cli.log);

  struct Criterion {
    std::string name;
    double budget_s;
    std::function<props::Check()> run;
  };
  const std::vector<Criterion> criteria = {
      {"balancing arithmetic", 1, [] { return props::balancing_arithmetic(); }},
      {"metric formulas", 1, [] { return props::metric_formulas(50, 2024); }},
      {"LDA correctness", 10,
       [] {
         props::Check out;
         const auto a = props::lda_two_class_direction(10, 1);
         const auto b = props::lda_fisher_maximality(20, 1000, 2);
         const auto c = props::lda_translation_invariance(10, 3);
         for (const auto* part : {&a, &b, &c})
           if (!part->pass) out.fail(part->detail);
         if (out.pass) out.detail = "(a) " + a.detail + "; (b) " + b.detail + "; (c) " + c.detail;
         return out;
       }},
      {"SVM correctness", 30,
       [] {
         props::Check out;
         const auto a = props::svm_two_point();
         const auto b = props::svm_matches_qp(10, 4);
         const auto c = props::svm_monotone_objective(10, 5);
         for (const auto* part : {&a, &b, &c})
           if (!part->pass) out.fail(part->detail);
         if (out.pass) out.detail = a.detail + "; " + b.detail + "; " + c.detail;
         return out;
       }},
      {"fold laws", 5, [] { return props::fold_laws(200, 6); }},
      {"end-to-end synthetic pipeline", 120, [&] { return end_to_end(cli, work); }},
      {"noise ordering", 120, [&] { return noise_ordering(cli, work); }},
      {"determinism", 0, [&] { return determinism(cli, work); }},
      {"min-max laws", 0, [] { return props::minmax_laws(100, 8); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    props::Check result;
    try {
      result = c.run();
    } catch (const std::exception& e) {
      result.fail(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && seconds > c.budget_s) result.fail("took " + props::fmt(seconds) + " s, budget " + props::fmt(c.budget_s) + " s");
    failures += result.pass ? 0 : 1;
    std::printf("%s  %-30s %7.2fs  %s\n", result.pass ? "PASS" : "FAIL", c.name.c_str(), seconds, result.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
