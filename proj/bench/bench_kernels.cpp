// Benchmark of the OpenMP kernels against their serial reference
// implementations. Also verifies bitwise agreement on every run.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "drtsoh/drt_solver.hpp"
#include "drtsoh/eis_model.hpp"
#include "drtsoh/linalg.hpp"
#include "drtsoh/parallel.hpp"
#include "drtsoh/rng.hpp"
#include "drtsoh/soh_model.hpp"
#include "drtsoh/synthetic.hpp"

using namespace drtsoh;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <class F>
double time_best_of(int repeat, F&& f) {
    double best = 1e300;
    for (int r = 0; r < repeat; ++r) {
        const auto t0 = Clock::now();
        f();
        best = std::min(best, ms_since(t0));
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-28s serial %9.3f ms   omp %9.3f ms   speedup %5.2fx   %s\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms, identical ? "bitwise-identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    int threads = 0;
    int repeat = 5;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--threads" && i + 1 < argc) threads = std::atoi(argv[++i]);
        if (arg == "--repeat" && i + 1 < argc) repeat = std::atoi(argv[++i]);
    }
    par::set_threads(threads);
    std::printf("threads: %d, repeat: %d (best-of)\n", par::max_threads(), repeat);

    const FrequencyGrid fg = FrequencyGrid::log_spaced(1e-2, 1e4, 240);
    const TimeConstantGrid tg = build_tau_grid(1e-2, 1e4, 324, 1.0);

    // kernel fill
    {
        KernelMatrix ks = build_kernel_real_serial(fg, tg, true, KernelWeights::unit);
        KernelMatrix kp = build_kernel_real(fg, tg, true, KernelWeights::unit);
        const double ts = time_best_of(
            repeat, [&] { ks = build_kernel_real_serial(fg, tg, true, KernelWeights::unit); });
        const double tp =
            time_best_of(repeat, [&] { kp = build_kernel_real(fg, tg, true, KernelWeights::unit); });
        report("kernel fill 240x325", ts, tp, ks.entries == kp.entries);
    }

    const KernelMatrix a = build_kernel_real(fg, tg, true, KernelWeights::unit);

    // gram matrix
    {
        linalg::Matrix gs = linalg::gram_serial(a.entries);
        linalg::Matrix gp = linalg::gram(a.entries);
        const double ts = time_best_of(repeat, [&] { gs = linalg::gram_serial(a.entries); });
        const double tp = time_best_of(repeat, [&] { gp = linalg::gram(a.entries); });
        report("gram 325x325", ts, tp, gs == gp);
    }

    // matvec
    {
        Rng rng(7);
        linalg::Vector x(a.cols());
        for (double& v : x) v = rng.uniform();
        linalg::Vector ys, yp;
        const double ts = time_best_of(repeat, [&] {
            for (int k = 0; k < 200; ++k) ys = linalg::matvec_serial(a.entries, x);
        });
        const double tp = time_best_of(repeat, [&] {
            for (int k = 0; k < 200; ++k) yp = linalg::matvec(a.entries, x);
        });
        report("matvec x200", ts, tp, ys == yp);
    }

    // full DRT fit with L-curve (the lambda sweep is the parallel axis)
    {
        const DatasetConfig cfg = DatasetConfig::defaults();
        const std::vector<CellRecord> cells = gen_dataset(cfg, 1);
        const ImpedanceSpectrum& spectrum = cells[21].spectra.at({40, 25});
        const TimeConstantGrid fit_tg = build_tau_grid(cfg.f_min_hz, cfg.f_max_hz, 81, 1.0);
        FitResult r1 = fit_drt(spectrum, fit_tg);
        double tp = time_best_of(repeat, [&] { r1 = fit_drt(spectrum, fit_tg); });
        par::set_threads(1);
        FitResult r2 = fit_drt(spectrum, fit_tg);
        const double ts = time_best_of(repeat, [&] { r2 = fit_drt(spectrum, fit_tg); });
        par::set_threads(threads);
        report("fit_drt lcurve25", ts, tp, r1.solution.g_ohm() == r2.solution.g_ohm());
    }

    // batch gradients of the default LSTM (parallel across samples)
    {
        const ModelConfig config;
        const SohModelParams params = SohModelParams::init_random(config, 3);
        Rng rng(11);
        const std::size_t batch = 8, T = 5;
        std::vector<std::vector<linalg::Vector>> inputs(batch);
        std::vector<std::vector<double>> targets(batch, std::vector<double>(T, 1.0));
        for (auto& seq : inputs) {
            seq.assign(T, linalg::Vector(config.input_dim));
            for (auto& x : seq)
                for (double& v : x) v = rng.normal();
        }
        auto run_batch = [&](bool parallel) {
            std::vector<SohModelParams> grads(batch);
            auto body = [&](std::size_t i) {
                ForwardCache cache;
                forward(params, inputs[i], &cache);
                grads[i] = backward(params, cache, targets[i]);
            };
            if (parallel) {
                par::parallel_for(batch, body);
            } else {
                par::serial_for(batch, body);
            }
            return grads;
        };
        std::vector<SohModelParams> gs = run_batch(false), gp = run_batch(true);
        const double ts = time_best_of(repeat, [&] { gs = run_batch(false); });
        const double tp = time_best_of(repeat, [&] { gp = run_batch(true); });
        bool same = true;
        for (std::size_t i = 0; i < batch && same; ++i) {
            same = gs[i].flatten() == gp[i].flatten();
        }
        report("lstm batch-8 grads", ts, tp, same);
    }

    return 0;
}
