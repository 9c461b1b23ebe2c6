#include <benchmark/benchmark.h>

#include "volwarp/mannequin.hpp"
#include "volwarp/metrics.hpp"
#include "volwarp/pipeline.hpp"
#include "volwarp/voxelize.hpp"
#include "volwarp/warp.hpp"

using namespace volwarp;

namespace {

struct WarpCase {
  Mannequin mannequin;
  TransformSet transforms;
};

const WarpCase& warp_case() {
  static const WarpCase c = [] {
    MannequinSpec spec;
    spec.dims = {128, 128, 32};
    spec.channels = 16;
    spec.pose = mannequin_pose(spec.dims);
    Mannequin m = make_mannequin(spec);
    TransformSet t = fit_part_transforms(spec.skeleton, spec.pose, mannequin_pose(spec.dims, "reach"),
                                         ReposeMode::k3d);
    return WarpCase{std::move(m), std::move(t)};
  }();
  return c;
}

void BM_MaskedWarp3d(benchmark::State& state) {
  const WarpCase& c = warp_case();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Volume out = warp_with(c.mannequin.volume, c.mannequin.masks, c.transforms, threads);
    benchmark::DoNotOptimize(out.storage().data());
  }
}
BENCHMARK(BM_MaskedWarp3d)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_CapsuleMask(benchmark::State& state) {
  const Dims3 dims{128, 128, 32};
  for (auto _ : state) {
    PartMask m = capsule_mask(dims, Vec3(20, 30, 8), Vec3(100, 90, 24), 6.0);
    benchmark::DoNotOptimize(m.data.data());
  }
}
BENCHMARK(BM_CapsuleMask)->Unit(benchmark::kMicrosecond);

void BM_Ssim(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Image a(n, n, 3), b(n, n, 3);
  for (std::size_t i = 0; i < a.storage().size(); ++i) {
    a.storage()[i] = float(i % 97) / 97.0f;
    b.storage()[i] = float(i % 89) / 89.0f;
  }
  for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b));
}
BENCHMARK(BM_Ssim)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
