#include <benchmark/benchmark.h>

#include "cervix_cad/descriptors.hpp"
#include "cervix_cad/eval.hpp"
#include "cervix_cad/fusion.hpp"
#include "cervix_cad/lda.hpp"
#include "cervix_cad/svm.hpp"
#include "cervix_cad/synth.hpp"

namespace {

cervix::FeatureMatrix fused(int per_class, int block_dim) {
  cervix::SynthOptions o;
  o.per_class = per_class;
  o.block_dim = block_dim;
  o.informative_dims = 3 * block_dim / 10;
  o.separation = 4.0;
  const auto data = cervix::generate_synthetic(o);
  auto m = cervix::fuse(data.rn50, data.rn101, data.rn152, data.manifest);
  return cervix::apply_scaler(cervix::fit_scaler(m), m);
}

void BM_LdaFit(benchmark::State& state) {
  const auto m = fused(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(cervix::fit_lda(m, cervix::kDefaultShrinkage));
  state.SetLabel("n=" + std::to_string(m.n()) + " d=" + std::to_string(m.d()));
}
BENCHMARK(BM_LdaFit)->Args({100, 512})->Args({240, 2048})->Unit(benchmark::kMillisecond);

void BM_SvmMulticlass(benchmark::State& state) {
  const auto m = fused(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(cervix::train_multiclass(m, cervix::SvmOptions{}));
  state.SetLabel("n=" + std::to_string(m.n()) + " d=" + std::to_string(m.d()));
}
BENCHMARK(BM_SvmMulticlass)->Args({100, 512})->Args({240, 2048})->Args({240, 16})->Unit(benchmark::kMillisecond);

void BM_ExperimentFold(benchmark::State& state) {
  const auto m = fused(60, 256);
  cervix::ExperimentOptions opt;
  opt.ks = {5};
  for (auto _ : state) benchmark::DoNotOptimize(cervix::run_experiment(m, opt));
}
BENCHMARK(BM_ExperimentFold)->Unit(benchmark::kMillisecond);

void BM_BackboneExtract(benchmark::State& state) {
  const auto backbone =
      cervix::load_backbone(std::string(CERVIX_BENCH_DATA_DIR) + "/tiny_backbone.onnx", cervix::BackboneVariant::rn50);
  cervix::ImageRgb img(224, 224);
  for (std::size_t i = 0; i < img.data().size(); ++i) img.data()[i] = static_cast<std::uint8_t>(i * 7 % 251);
  for (auto _ : state) benchmark::DoNotOptimize(cervix::extract(backbone, img));
}
BENCHMARK(BM_BackboneExtract)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
