#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// deliberately avoid the library's solve paths.

#include <cmath>
#include <cstdint>
#include <vector>

#include "drtsoh/drt_solver.hpp"
#include "drtsoh/eis_model.hpp"
#include "drtsoh/evalharness.hpp"
#include "drtsoh/linalg.hpp"
#include "drtsoh/rng.hpp"
#include "drtsoh/synthetic.hpp"

namespace testutil {

using namespace drtsoh;

inline double rel_err(double a, double b, double floor = 1e-8) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (const double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

// Independent dense solve: Gaussian elimination with partial pivoting. Second
// factorization path against the library's Cholesky-based solves.
inline std::vector<double> gauss_solve(linalg::Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        }
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(piv, c));
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ri = n; ri-- > 0;) {
        double s = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) s -= a(ri, c) * x[c];
        x[ri] = s / a(ri, ri);
    }
    return x;
}

// The three-peak benchmark problem used across solver and feature tests:
// well-separated peaks inside the 10 mHz..10 kHz window.
struct Benchmark {
    TimeConstantGrid tg;
    FrequencyGrid fg;
    DrtSolution truth;
    std::vector<double> peak_centers_log10; // truth peak centers
};

inline const Benchmark& benchmark3() {
    static const Benchmark b = [] {
        TimeConstantGrid tg = build_tau_grid(1e-2, 1e4, 81, 1.0);
        FrequencyGrid fg = FrequencyGrid::log_spaced(1e-2, 1e4, 60);
        const std::vector<PeakSpec> peaks{
            {-2.2, 0.008, 0.20}, {-0.7, 0.007, 0.22}, {0.45, 0.009, 0.25}};
        DrtSolution truth = sample_peaks_on_grid(peaks, tg, 0.012);
        return Benchmark{std::move(tg), std::move(fg), std::move(truth), {-2.2, -0.7, 0.45}};
    }();
    return b;
}

/// Multiplicative Gaussian noise on both parts, seeded.
inline ImpedanceSpectrum noisy_spectrum(const DrtSolution& truth, const FrequencyGrid& fg,
                                        double sigma, std::uint64_t seed) {
    const ImpedanceSpectrum clean = forward_model(truth, fg);
    std::vector<double> zr = clean.z_real_ohm();
    std::vector<double> zi = clean.z_imag_ohm();
    Rng rng(Rng::mix(seed, 0xBE9C));
    for (std::size_t i = 0; i < zr.size(); ++i) {
        zr[i] *= 1.0 + sigma * rng.normal();
        zi[i] *= 1.0 + sigma * rng.normal();
    }
    return ImpedanceSpectrum(fg, std::move(zr), std::move(zi));
}

/// The shared synthetic corpus (master seed 42), built once per binary.
inline const std::vector<CellRecord>& corpus() {
    static const std::vector<CellRecord> cells = gen_dataset(DatasetConfig::defaults(), 42);
    return cells;
}

/// Sequence samples from L-curve DRT fits at 25% SOC, built once per binary.
inline const std::vector<SequenceSample>& corpus_samples() {
    static const std::vector<SequenceSample> samples = build_sequence_dataset(corpus());
    return samples;
}

/// Small model config for fast training tests.
inline ModelConfig tiny_model_config() {
    ModelConfig c;
    c.input_dim = 3;
    c.lstm_hidden = {4, 4, 4};
    c.fc_dims = {4, 2, 1};
    return c;
}

} // namespace testutil
