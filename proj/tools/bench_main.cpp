// Serial vs OpenMP timings for the batch kernels: Monte-Carlo moment sums,
// cascading-randomisation sweeps, and input-noise sweeps. The parallel paths
// are chunk-deterministic, so the checksum column must match exactly.

#include <chrono>
#include <cstdio>

#include "attrgame/checks.hpp"
#include "attrgame/gauss.hpp"
#include "attrgame/rand_harness.hpp"
#include "attrgame/rng.hpp"

using namespace attrgame;

namespace {

double now_run(double (*work)(RunMode), RunMode mode, double* out) {
    auto t0 = std::chrono::steady_clock::now();
    *out = work(mode);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double sample_relu(std::mt19937_64& rng, double mu, double sd) {
    std::normal_distribution<double> n(mu, sd);
    return std::max(n(rng), 0.0);
}

double mc_workload(RunMode mode) {
    double acc = 0.0;
    for (int t = 0; t < 24; ++t) {
        McStats s = mc_mean(1'000'000, 99, "bench-mc-" + std::to_string(t), sample_relu,
                            0.3 * t - 2.0, 1.0 + 0.1 * t, mode);
        acc += s.mean;
    }
    return acc;
}

NetSpec bench_net() {
    GenNetOptions o;
    o.widths = {5, 6, 6, 6, 1};
    o.act = {Activation::ReLU, 1.0};
    return gen_net(o, 4242);
}

double cascade_workload(RunMode mode) {
    NetSpec net = bench_net();
    std::vector<Vec> inputs;
    std::mt19937_64 rng = substream(4242, "bench-inputs");
    std::normal_distribution<double> d(0.0, 1.5);
    for (int i = 0; i < 24; ++i) {
        Vec x(net.input_dim);
        for (double& v : x) v = d(rng);
        inputs.push_back(std::move(x));
    }
    RGConfig cfg;
    SweepResult r = randomization_sweep(net, inputs, cfg, {11, 12, 13, 14}, mode);
    double acc = 0.0;
    for (const SweepRow& row : r.rows) acc += row.h_mean;
    return acc;
}

double noise_workload(RunMode mode) {
    NetSpec net = bench_net();
    Vec x(net.input_dim, 0.8);
    RGConfig cfg;
    SweepResult r =
        input_noise_sweep(net, x, {0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0}, cfg, 77, 48, mode);
    double acc = 0.0;
    for (const SweepRow& row : r.rows) acc += row.h_mean;
    return acc;
}

void bench(const char* name, double (*work)(RunMode)) {
    double serial_val = 0.0, parallel_val = 0.0;
    double ts = now_run(work, RunMode::Serial, &serial_val);
    double tp = now_run(work, RunMode::Parallel, &parallel_val);
    std::printf("%-28s serial %8.3fs   omp %8.3fs   speedup %5.2fx   checksums %s\n", name, ts, tp,
                ts / tp, serial_val == parallel_val ? "match" : "DIFFER");
}

}  // namespace

int main() {
    std::printf("OpenMP: %s, max threads %d\n", openmp_enabled() ? "on" : "off", max_threads());
    bench("relu-moment monte carlo", mc_workload);
    bench("cascade randomisation sweep", cascade_workload);
    bench("input-noise sweep", noise_workload);
    return 0;
}
