#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "drtsoh/drt_solver.hpp"
#include "drtsoh/features.hpp"
#include "drtsoh/rng.hpp"
#include "testutil.hpp"

using namespace drtsoh;
using namespace testutil;

namespace {

KernelMatrix random_kernel(std::size_t m, std::size_t n, std::uint64_t seed, bool positive = false) {
    KernelMatrix k{linalg::Matrix(m, n), false};
    Rng rng(seed);
    for (double& v : k.entries.data()) v = positive ? rng.uniform(0.1, 1.0) : rng.normal();
    return k;
}

linalg::Vector random_vector(std::size_t n, std::uint64_t seed) {
    linalg::Vector v(n);
    Rng rng(seed);
    for (double& x : v) x = rng.normal();
    return v;
}

// KKT check for min ||Ag-z||^2 + lambda ||Dg||^2 s.t. g >= 0, scaled by
// ||A^T z||_inf. Independent of the solver's internal bookkeeping.
double kkt_violation_scaled(const KernelMatrix& a, const linalg::Vector& z, double lambda,
                            const linalg::Vector& g) {
    const linalg::Vector fit = linalg::matvec_serial(a.entries, g);
    linalg::Vector resid(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) resid[i] = fit[i] - z[i];
    linalg::Vector grad = linalg::matvec_transpose_serial(a.entries, resid);
    for (std::size_t j = 0; j < g.size(); ++j) {
        const bool penalized = !a.includes_r0_column || j > 0;
        grad[j] = 2.0 * (grad[j] + (penalized ? lambda * g[j] : 0.0));
    }
    const double scale = std::max(max_abs(linalg::matvec_transpose_serial(a.entries, z)), 1e-300);
    double viol = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (g[j] < 0.0) return 1e300; // infeasible
        viol = std::max(viol, g[j] > 0.0 ? std::abs(grad[j]) : std::max(-grad[j], 0.0));
    }
    return viol / (2.0 * scale);
}

} // namespace

TEST_SUITE("drt_solver") {

TEST_CASE("ridge on the identity kernel shrinks by 1/(1+lambda)") {
    const std::size_t n = 6;
    KernelMatrix eye{linalg::Matrix::identity(n), false};
    const linalg::Vector z = random_vector(n, 1);
    const double lambda = 0.37;
    const linalg::Vector g = solve_ridge(eye, z, lambda);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel_err(g[i], z[i] / (1.0 + lambda)) < 1e-12);
}

TEST_CASE("ridge shrinks to zero as lambda grows") {
    const KernelMatrix a = random_kernel(8, 5, 2);
    const linalg::Vector z = random_vector(8, 3);
    const double bnorm = linalg::norm2(linalg::matvec_transpose_serial(a.entries, z));
    for (const double lambda : {1e2, 1e4, 1e6}) {
        const linalg::Vector g = solve_ridge(a, z, lambda);
        CHECK(linalg::norm2(g) <= bnorm / lambda * (1.0 + 1e-12));
    }
}

TEST_CASE("ridge matches an independent dense solve") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const KernelMatrix a = random_kernel(6, 4, 100 + seed);
        const linalg::Vector z = random_vector(6, 200 + seed);
        const double lambda = 0.1;
        const linalg::Vector g = solve_ridge(a, z, lambda);

        linalg::Matrix normal = linalg::gram_serial(a.entries);
        for (std::size_t i = 0; i < 4; ++i) normal(i, i) += lambda;
        const std::vector<double> g_ref =
            gauss_solve(normal, linalg::matvec_transpose_serial(a.entries, z));
        for (std::size_t i = 0; i < 4; ++i) CHECK(rel_err(g[i], g_ref[i]) < 1e-10);
    }
}

TEST_CASE("ridge argument errors") {
    const KernelMatrix a = random_kernel(6, 4, 7);
    CHECK_THROWS_AS(solve_ridge(a, random_vector(5, 8), 1.0), ArgumentError);
    CHECK_THROWS_AS(solve_ridge(a, random_vector(6, 8), 0.0), ArgumentError);
}

TEST_CASE("nnls equals ridge when the constraint is inactive") {
    // strictly positive truth, zero noise, tiny lambda
    KernelMatrix a = random_kernel(8, 5, 11, true);
    linalg::Vector gstar(5);
    Rng rng(12);
    for (double& v : gstar) v = rng.uniform(0.5, 1.5);
    const linalg::Vector z = linalg::matvec_serial(a.entries, gstar);

    const double lambda = 1e-12;
    const linalg::Vector ridge = solve_ridge(a, z, lambda);
    for (const double v : ridge) REQUIRE(v > 0.0);
    const NnlsResult nnls = solve_nnls_tikhonov(a, z, lambda);
    CHECK(nnls.report.converged);
    CHECK(nnls.report.active_set_size == 0);
    for (std::size_t i = 0; i < 5; ++i) CHECK(rel_err(nnls.g[i], ridge[i]) < 1e-8);
}

TEST_CASE("nnls returns zero when the data force negativity") {
    const KernelMatrix a = random_kernel(7, 4, 21, true);
    linalg::Vector ones(4, 1.0);
    linalg::Vector z = linalg::matvec_serial(a.entries, ones);
    for (double& v : z) v = -v;
    const NnlsResult r = solve_nnls_tikhonov(a, z, 1e-3);
    CHECK(r.report.converged);
    for (const double v : r.g) CHECK(v == 0.0);
    CHECK(r.report.active_set_size == 4);
}

TEST_CASE("nnls satisfies the KKT conditions on random instances") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const KernelMatrix a = random_kernel(12, 8, 300 + seed);
        const linalg::Vector z = random_vector(12, 400 + seed);
        const double lambda = std::pow(10.0, -6.0 + 0.5 * static_cast<double>(seed));
        const NnlsResult r = solve_nnls_tikhonov(a, z, lambda);
        CHECK(r.report.converged);
        // complementary slackness at the op tolerance
        CHECK(kkt_violation_scaled(a, z, lambda, r.g) < 1e-10);
    }
}

TEST_CASE("nnls equals ridge whenever ridge is nonnegative") {
    int qualifying = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const std::size_t m = 5 + seed % 8, n = 3 + seed % 5;
        const KernelMatrix a = random_kernel(m, n, 500 + seed, true);
        linalg::Vector gstar(n);
        Rng rng(600 + seed);
        for (double& v : gstar) v = rng.uniform(0.2, 1.0);
        linalg::Vector z = linalg::matvec_serial(a.entries, gstar);
        for (double& v : z) v *= 1.0 + 0.05 * rng.normal();

        const double lambda = 1e-6;
        const linalg::Vector ridge = solve_ridge(a, z, lambda);
        if (*std::min_element(ridge.begin(), ridge.end()) < 0.0) continue;
        ++qualifying;
        const NnlsResult r = solve_nnls_tikhonov(a, z, lambda);
        for (std::size_t i = 0; i < n; ++i) CHECK(rel_err(r.g[i], ridge[i]) < 1e-8);
    }
    CHECK(qualifying >= 10);
}

TEST_CASE("nnls is deterministic") {
    const KernelMatrix a = random_kernel(10, 6, 31);
    const linalg::Vector z = random_vector(10, 32);
    const NnlsResult r1 = solve_nnls_tikhonov(a, z, 1e-4);
    const NnlsResult r2 = solve_nnls_tikhonov(a, z, 1e-4);
    CHECK(r1.g == r2.g);
    CHECK(r1.report.iterations == r2.report.iterations);
}

TEST_CASE("lcurve rejects short or unsorted grids") {
    const Benchmark& b = benchmark3();
    const KernelMatrix a = build_kernel_real(b.fg, b.tg, true, KernelWeights::unit);
    const ImpedanceSpectrum z = forward_model(b.truth, b.fg);
    CHECK_THROWS_AS(lcurve_select(a, z.z_real_ohm(), std::vector<double>{1e-3, 1e-2, 1e-1}),
                    ArgumentError);
    CHECK_THROWS_AS(
        lcurve_select(a, z.z_real_ohm(), std::vector<double>{1e-3, 1e-2, 1e-1, 1.0, 1e-4}),
        ArgumentError);
}

TEST_CASE("lcurve monotonicity and determinism on the benchmark") {
    const Benchmark& b = benchmark3();
    const KernelMatrix a = build_kernel_real(b.fg, b.tg, true, KernelWeights::unit);
    const ImpedanceSpectrum spec = noisy_spectrum(b.truth, b.fg, 0.003, 5);
    const std::vector<double> grid = default_lambda_grid(a);

    const LCurveResult r1 = lcurve_select(a, spec.z_real_ohm(), grid);
    const LCurveResult r2 = lcurve_select(a, spec.z_real_ohm(), grid);
    CHECK(r1.lambda_star == r2.lambda_star);

    for (std::size_t i = 1; i < r1.points.size(); ++i) {
        CHECK(r1.points[i].residual_norm >= r1.points[i - 1].residual_norm - 1e-10);
        CHECK(r1.points[i].solution_norm <= r1.points[i - 1].solution_norm + 1e-10);
    }
}

TEST_CASE("lcurve corner is near the oracle-optimal lambda") {
    const Benchmark& b = benchmark3();
    const KernelMatrix a = build_kernel_real(b.fg, b.tg, true, KernelWeights::unit);
    const ImpedanceSpectrum spec = noisy_spectrum(b.truth, b.fg, 0.003, 7);
    const std::vector<double> grid = default_lambda_grid(a);
    const LCurveResult sel = lcurve_select(a, spec.z_real_ohm(), grid);

    // ground-truth sweep: relative L2 error of g against the known truth
    std::vector<double> errs(grid.size());
    double truth_norm = linalg::norm2(b.truth.g_ohm());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const NnlsResult r = solve_nnls_tikhonov(a, spec.z_real_ohm(), grid[i]);
        double e2 = 0.0;
        for (std::size_t j = 0; j < b.truth.g_ohm().size(); ++j) {
            const double d = r.g[j + 1] - b.truth.g_ohm()[j];
            e2 += d * d;
        }
        errs[i] = std::sqrt(e2) / truth_norm;
    }
    const std::size_t best = static_cast<std::size_t>(
        std::min_element(errs.begin(), errs.end()) - errs.begin());
    const std::size_t picked = static_cast<std::size_t>(
        std::find(grid.begin(), grid.end(), sel.lambda_star) - grid.begin());
    const std::size_t dist = picked > best ? picked - best : best - picked;
    CHECK(dist <= 2);
}

TEST_CASE("lcurve degenerate curve raises a selection error") {
    KernelMatrix a = random_kernel(6, 3, 41, true);
    linalg::Vector z(6, -1.0); // forces g = 0 at every lambda
    const std::vector<double> grid{1e-4, 1e-3, 1e-2, 1e-1, 1.0};
    CHECK_THROWS_AS(lcurve_select(a, z, grid), LCurveDegenerateError);
}

TEST_CASE("fit_drt round-trips a noiseless spectrum") {
    const Benchmark& b = benchmark3();
    const ImpedanceSpectrum clean = forward_model(b.truth, b.fg);
    const FitResult fit = fit_drt(clean, b.tg);
    const ImpedanceSpectrum refit = forward_model(fit.solution, b.fg);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        const double d = refit.z_real_ohm()[i] - clean.z_real_ohm()[i];
        num += d * d;
        den += clean.z_real_ohm()[i] * clean.z_real_ohm()[i];
    }
    CHECK(std::sqrt(num / den) < 1e-6);
    CHECK(fit.report.converged);
    CHECK(!fit.lcurve.empty());
}

TEST_CASE("fit_drt recovers r0 and rp from noisy spectra (20-seed median)") {
    const Benchmark& b = benchmark3();
    std::vector<double> rp_errs, r0_errs;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ImpedanceSpectrum spec = noisy_spectrum(b.truth, b.fg, 0.005, 1000 + seed);
        const FitResult fit = fit_drt(spec, b.tg);
        rp_errs.push_back(std::abs(fit.solution.rp_ohm() - b.truth.rp_ohm()) / b.truth.rp_ohm());
        r0_errs.push_back(std::abs(fit.solution.r0_ohm() - b.truth.r0_ohm()) / b.truth.r0_ohm());
    }
    CHECK(median(rp_errs) < 0.05);
    CHECK(median(r0_errs) < 0.02);
}

TEST_CASE("fit_drt on a flat spectrum yields pure ohmic resistance") {
    const FrequencyGrid fg = FrequencyGrid::log_spaced(1e-2, 1e4, 30);
    const double c = 0.042;
    const ImpedanceSpectrum flat(fg, std::vector<double>(30, c), std::vector<double>(30, 0.0));
    const TimeConstantGrid tg = build_tau_grid(1e-2, 1e4, 41, 1.0);
    const FitResult fit = fit_drt(flat, tg);
    CHECK(fit.solution.r0_ohm() == doctest::Approx(c).epsilon(1e-9));
    CHECK(fit.solution.rp_ohm() < 1e-9 * c);
}

TEST_CASE("fit_drt honors a fixed lambda and records it") {
    const Benchmark& b = benchmark3();
    const ImpedanceSpectrum spec = noisy_spectrum(b.truth, b.fg, 0.003, 3);
    FitOptions opt;
    opt.lambda = 1e-3;
    const FitResult fit = fit_drt(spec, b.tg, opt);
    CHECK(fit.solution.lambda() == 1e-3);
    CHECK(fit.lcurve.empty());
}

TEST_CASE("fit_drt joint real+imaginary fit stays close to the truth") {
    const Benchmark& b = benchmark3();
    const ImpedanceSpectrum spec = noisy_spectrum(b.truth, b.fg, 0.003, 9);
    FitOptions opt;
    opt.use_imag = true;
    const FitResult fit = fit_drt(spec, b.tg, opt);
    CHECK(std::abs(fit.solution.rp_ohm() - b.truth.rp_ohm()) / b.truth.rp_ohm() < 0.10);
}

TEST_CASE("3-peak benchmark: lcurve fit localizes peaks and rp") {
    const Benchmark& b = benchmark3();
    const ImpedanceSpectrum spec = noisy_spectrum(b.truth, b.fg, 0.003, 77);
    const FitResult fit = fit_drt(spec, b.tg);
    CHECK(std::abs(fit.solution.rp_ohm() - b.truth.rp_ohm()) / b.truth.rp_ohm() < 0.05);

    const std::vector<DrtPeak> peaks = find_peaks(fit.solution);
    REQUIRE(!peaks.empty());
    for (const double truth_center : b.peak_centers_log10) {
        double best = 1e300;
        for (const auto& p : peaks) {
            best = std::min(best, std::abs(std::log10(p.tau_at_max_s) - truth_center));
        }
        CHECK(best <= 0.5);
    }
}

} // TEST_SUITE
