// Serial vs OpenMP timings for the parallel kernels: matmul, drawing
// tokenization, and the batch evaluation loop. The parallel paths must
// produce bit-identical results, so the checksum column doubles as a
// correctness guard.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "vecspot/pipeline.hpp"
#include "vecspot/rng.hpp"
#include "vecspot/synth.hpp"

using namespace vecspot;

namespace {

double seconds(const std::function<void()>& fn, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void row(const char* name, double serial, double parallel, double checksum_serial,
         double checksum_parallel) {
  std::printf("%-22s %10.2f ms %10.2f ms %8.2fx  %s\n", name, serial * 1e3,
              parallel * 1e3, serial / parallel,
              checksum_serial == checksum_parallel ? "bitwise-equal" : "MISMATCH");
}

double checksum(const Mat& m) {
  double s = 0.0;
  for (size_t i = 0; i < m.size(); ++i) s += m.a[i] * static_cast<double>(i % 17 + 1);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
  std::printf("threads available: %d, reps per measurement: %d\n\n", max_threads(),
              reps);
  std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  {
    Rng rng(1);
    const int n = 384;
    Mat a(n, n), b(n, n);
    for (double& x : a.a) x = rng.uniform(-1, 1);
    for (double& x : b.a) x = rng.uniform(-1, 1);
    Mat out_serial, out_parallel;
    const double ts = seconds([&] { out_serial = matmul_serial(a, b); }, reps);
    const double tp = seconds([&] { out_parallel = matmul(a, b); }, reps);
    row("matmul 384x384", ts, tp, checksum(out_serial), checksum(out_parallel));
  }

  SynthConfig synth_cfg;
  synth_cfg.seed = 99;
  synth_cfg.count = 40;
  const auto drawings = generate(synth_cfg);

  {
    SamplingConfig cfg;
    cfg.alpha_sample = 0.01;
    double sum_serial = 0.0, sum_parallel = 0.0;
    const double ts = seconds(
        [&] {
          sum_serial = 0.0;
          for (const Drawing& d : drawings) {
            sum_serial += static_cast<double>(tokenize_drawing_serial(d, cfg).segments.size());
          }
        },
        reps);
    const double tp = seconds(
        [&] {
          sum_parallel = 0.0;
          for (const Drawing& d : drawings) {
            sum_parallel += static_cast<double>(tokenize_drawing(d, cfg).segments.size());
          }
        },
        reps);
    row("tokenize 40 drawings", ts, tp, sum_serial, sum_parallel);
  }

  {
    ModelConfig mc;
    mc.encoder.embed_dim = 32;
    mc.encoder.depth = 2;
    mc.encoder.heads = 4;
    mc.encoder.window = 32;
    mc.decoder.embed_dim = 32;
    mc.decoder.layers = 6;
    mc.decoder.heads = 4;
    mc.decoder.class_count = SynthClasses::kCount;
    const SpottingModel model(mc);
    std::vector<NamedDrawing> named;
    for (size_t i = 0; i < drawings.size(); ++i) {
      named.push_back({"d" + std::to_string(i), drawings[i]});
    }
    PipelineConfig pc;
    pc.sampling.alpha_sample = 0.05;
    pc.write_svg = false;
    PipelineResult rs, rp;
    const double ts = seconds([&] { rs = run_pipeline_serial(model, named, pc); }, reps);
    const double tp = seconds([&] { rp = run_pipeline(model, named, pc); }, reps);
    row("pipeline 40 drawings", ts, tp, rs.pq.total.pq, rp.pq.total.pq);
  }
  return 0;
}
