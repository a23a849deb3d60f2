#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cervix_cad/binary_io.hpp"
#include "cervix_cad/config.hpp"
#include "cervix_cad/descriptors.hpp"
#include "cervix_cad/error.hpp"
#include "cervix_cad/eval.hpp"
#include "cervix_cad/fusion.hpp"
#include "cervix_cad/pipeline.hpp"
#include "cervix_cad/prepare.hpp"
#include "cervix_cad/synth.hpp"

namespace fs = std::filesystem;
using namespace cervix;

namespace {

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::vector<int> parse_ks(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split_commas(s)) {
    int k = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), k);
    if (ec != std::errc() || ptr != item.data() + item.size() || k < 2)
      throw ConfigError("--k expects integers >= 2, got '" + s + "'");
    out.push_back(k);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& s, const char* flag) {
  std::vector<double> out;
  for (const auto& item : split_commas(s)) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size() || !(v > 0.0)) throw ConfigError(std::string(flag) + " expects positive numbers");
    out.push_back(v);
  }
  return out;
}

std::string read_text(const fs::path& p) {
  const auto bytes = io::read_file(p);
  return {bytes.begin(), bytes.end()};
}

std::string c_label(double c) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", c);
  return buf;
}

struct EvaluateArgs {
  std::vector<std::string> features;
  std::string manifest;
  std::string ks = "5,10";
  std::string variants = "rn50,rn101,rn152,fusion,fusion+lda";
  std::uint64_t seed = 0;
  double c = 1.0;
  double gamma = 0.1;
  std::string out;
  bool per_fold_mean = false;
  std::string groups;
  std::string c_grid;
};

FeatureMatrix load_features(const EvaluateArgs& a, const DatasetManifest& manifest) {
  std::vector<DescriptorCache> caches;
  for (const auto& f : a.features) caches.push_back(read_cache(f));
  if (caches.size() == 1) {
    if (caches[0].variant != BackboneVariant::fused)
      throw DataError("a single --features cache must be fused; pass the rn50, rn101 and rn152 caches otherwise");
    return to_feature_matrix(caches[0], manifest);
  }
  if (caches.size() != 3) throw DataError("--features takes one fused cache or three backbone caches");
  const DescriptorCache* by_variant[3] = {nullptr, nullptr, nullptr};
  for (const auto& c : caches) {
    const auto i = static_cast<std::size_t>(c.variant);
    if (i > 2 || by_variant[i]) throw DataError("--features needs exactly one rn50, one rn101 and one rn152 cache");
    by_variant[i] = &c;
  }
  return fuse(*by_variant[0], *by_variant[1], *by_variant[2], manifest);
}

void run_evaluate(const EvaluateArgs& a) {
  if (a.c <= 0.0) throw ConfigError("--c must be positive");
  if (a.gamma < 0.0 || a.gamma > 1.0) throw ConfigError("--gamma must lie in [0, 1]");
  const DatasetManifest manifest = read_manifest(a.manifest);
  const FeatureMatrix features = load_features(a, manifest);

  ExperimentOptions opt;
  opt.ks = parse_ks(a.ks);
  opt.variants.clear();
  for (const auto& v : split_commas(a.variants)) opt.variants.push_back(parse_pipeline_variant(v));
  opt.seed = a.seed;
  opt.svm.c = a.c;
  opt.lda_shrinkage = a.gamma;
  opt.per_fold_mean = a.per_fold_mean;
  if (!a.groups.empty()) opt.groups = read_groups(a.groups, manifest);

  std::ostringstream prov;
  prov << "manifest = " << a.manifest << "\nfeatures = ";
  for (std::size_t i = 0; i < a.features.size(); ++i) prov << (i ? "," : "") << a.features[i];
  prov << "\nk = " << a.ks << "\nvariants = " << a.variants << "\nseed = " << a.seed << "\ngamma = " << a.gamma
       << "\nper_fold_mean = " << (a.per_fold_mean ? "true" : "false") << "\n";

  const fs::path out(a.out);
  fs::create_directories(out);
  const std::vector<double> grid = a.c_grid.empty() ? std::vector<double>{a.c} : parse_doubles(a.c_grid, "--c-grid");
  for (const double c : grid) {
    opt.svm.c = c;
    const MetricsReport report = run_experiment(features, opt);
    const fs::path dir = grid.size() == 1 ? out : out / ("c_" + c_label(c));
    fs::create_directories(dir);
    const std::string provenance = prov.str() + "c = " + c_label(c) + "\n";
    emit_report(report, ReportFormat::tsv, dir / "metrics.tsv");
    emit_report(report, ReportFormat::text, dir / "metrics.txt", provenance);
    emit_report(report, ReportFormat::svg, dir / "metrics.svg", provenance);
    if (grid.size() > 1) {
      std::cout << "c = " << c_label(c) << "\n";
      for (const auto& r : report.rows)
        std::printf("  %-8s %-11s accuracy %.2f\n", validation_label(r.k).c_str(),
                    std::string(pipeline_variant_name(r.variant)).c_str(), r.metrics.accuracy);
    }
  }
  if (grid.size() == 1) std::cout << read_text(out / "metrics.txt");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Colposcopy image classification: descriptor fusion, LDA and linear SVM"};
  app.require_subcommand(1);

  // prepare
  PrepareOptions prep;
  std::string prep_scheme, prep_crop;
  auto* prepare = app.add_subcommand("prepare", "Resize, balance and augment a labelled image folder");
  prepare->add_option("--input", prep.input_dir, "Directory with one subdirectory per label")->required();
  prepare->add_option("--scheme", prep_scheme, "binary or ternary")->required();
  prepare->add_option("--seed", prep.seed, "Augmentation seed")->required();
  prepare->add_option("--out", prep.out_dir, "Output directory")->required();
  prepare->add_option("--fallback-crop", prep_crop, "Centered crop for unsegmented images, e.g. center:0.8");
  prepare->add_flag("--split-before-augment", prep.split_before_augment,
                    "Record source groups so folds never split an image from its augmentations");

  // extract
  std::string ex_manifest, ex_model, ex_variant, ex_out;
  auto* extract_cmd = app.add_subcommand("extract", "Compute 2048-length descriptors with an exported backbone");
  extract_cmd->add_option("--manifest", ex_manifest)->required();
  extract_cmd->add_option("--model", ex_model, "Head-removed ONNX graph")->required();
  extract_cmd->add_option("--variant", ex_variant, "rn50, rn101 or rn152")->required();
  extract_cmd->add_option("--out", ex_out, "Descriptor cache path")->required();

  // fuse
  std::string fu_manifest, fu_out;
  std::vector<std::string> fu_caches;
  auto* fuse_cmd = app.add_subcommand("fuse", "Concatenate the three backbone caches");
  fuse_cmd->add_option("--manifest", fu_manifest)->required();
  fuse_cmd->add_option("--features", fu_caches, "rn50, rn101 and rn152 caches")->required()->expected(3);
  fuse_cmd->add_option("--out", fu_out, "Fused cache path")->required();

  // evaluate
  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Stratified k-fold evaluation of every pipeline variant");
  evaluate->add_option("--features", ev.features, "One fused cache, or the three backbone caches")->required();
  evaluate->add_option("--manifest", ev.manifest)->required();
  evaluate->add_option("--k", ev.ks, "Comma-separated fold counts")->capture_default_str();
  evaluate->add_option("--variants", ev.variants)->capture_default_str();
  evaluate->add_option("--seed", ev.seed)->required();
  evaluate->add_option("--c", ev.c, "SVM cost")->capture_default_str();
  evaluate->add_option("--gamma", ev.gamma, "LDA shrinkage")->capture_default_str();
  evaluate->add_option("--out", ev.out, "Output directory")->required();
  evaluate->add_flag("--per-fold-mean", ev.per_fold_mean, "Average fold metrics instead of pooling counts");
  evaluate->add_option("--groups", ev.groups, "groups.tsv from prepare --split-before-augment");
  evaluate->add_option("--c-grid", ev.c_grid, "Comma-separated C values; one report per value");

  // report
  std::string rp_metrics, rp_scheme, rp_format = "text", rp_out, rp_config;
  auto* report_cmd = app.add_subcommand("report", "Render a metrics TSV as text, TSV or SVG");
  report_cmd->add_option("--metrics", rp_metrics, "metrics.tsv written by evaluate")->required();
  report_cmd->add_option("--scheme", rp_scheme, "binary or ternary")->required();
  report_cmd->add_option("--format", rp_format, "text, tsv or svg")->capture_default_str();
  report_cmd->add_option("--out", rp_out, "Output file (stdout when omitted)");
  report_cmd->add_option("--config", rp_config, "Experiment config embedded as provenance");

  // run
  std::string run_config;
  auto* run = app.add_subcommand("run", "Run the full pipeline from an experiment config");
  run->add_option("--config", run_config)->required();

  // synth
  SynthOptions so;
  std::string so_scheme = "ternary", so_out;
  auto* synth = app.add_subcommand("synth", "Write Gaussian-blob descriptor caches and a manifest");
  synth->add_option("--out", so_out)->required();
  synth->add_option("--scheme", so_scheme)->capture_default_str();
  synth->add_option("--seed", so.seed)->required();
  synth->add_option("--per-class", so.per_class)->capture_default_str();
  synth->add_option("--block-dim", so.block_dim)->capture_default_str();
  synth->add_option("--informative-dims", so.informative_dims, "0 = all dimensions")->capture_default_str();
  synth->add_option("--separation", so.separation, "Closest class-mean distance in noise std units")
      ->capture_default_str();
  synth->add_option("--noise-std", so.noise_std)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*prepare) {
      prep.scheme = parse_scheme(prep_scheme);
      if (!prep_crop.empty()) prep.fallback_crop = parse_fallback_crop(prep_crop);
      const PrepareResult r = prepare_dataset(prep);
      std::cout << "wrote " << r.manifest_path.string() << " (" << r.manifest.entries.size() << " images)\n";
    } else if (*extract_cmd) {
      const BackboneVariant v = parse_variant(ex_variant);
      const DatasetManifest m = read_manifest(ex_manifest);
      const Backbone backbone = load_backbone(ex_model, v);
      const DescriptorCache c = extract_all(backbone, m, fs::path(ex_manifest).parent_path(), ex_out);
      std::cout << "wrote " << ex_out << " (" << c.n << " x " << c.d << ")\n";
    } else if (*fuse_cmd) {
      const DatasetManifest m = read_manifest(fu_manifest);
      const FeatureMatrix fused = fuse(read_cache(fu_caches[0]), read_cache(fu_caches[1]), read_cache(fu_caches[2]), m);
      write_cache(fu_out, to_fused_cache(fused, m));
      std::cout << "wrote " << fu_out << " (" << fused.n() << " x " << fused.d() << ")\n";
    } else if (*evaluate) {
      run_evaluate(ev);
    } else if (*report_cmd) {
      const LabelScheme scheme = parse_scheme(rp_scheme);
      const ReportFormat fmt = parse_report_format(rp_format);
      const MetricsReport r = parse_tsv(read_text(rp_metrics), scheme);
      const std::string provenance = rp_config.empty() ? std::string() : validate_config(rp_config).resolved;
      if (rp_out.empty()) {
        std::cout << (fmt == ReportFormat::tsv   ? format_tsv(r)
                      : fmt == ReportFormat::svg ? format_svg(r, provenance)
                                                 : format_text(r, provenance));
      } else {
        emit_report(r, fmt, rp_out, provenance);
      }
    } else if (*run) {
      const ExperimentConfig cfg = validate_config(run_config);
      const PipelineResult r = run_pipeline(cfg, [](std::string_view msg) { std::cerr << msg << "\n"; });
      std::cout << read_text(r.text);
    } else if (*synth) {
      so.scheme = parse_scheme(so_scheme);
      write_synthetic(generate_synthetic(so), so_out);
      std::cout << "wrote " << (fs::path(so_out) / kManifestFile).string() << " and three descriptor caches\n";
    }
  } catch (const std::exception& e) {
    const int code = exit_code_for_current_exception();
    std::cerr << "error: " << e.what() << "\n";
    return code;
  }
  return kExitOk;
}
