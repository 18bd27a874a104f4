#include "drtsoh/drt_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "drtsoh/parallel.hpp"

namespace drtsoh {

namespace {

// 1 for penalized columns, 0 for the unregularized R0 column.
std::vector<double> penalty_diag(const KernelMatrix& a) {
    std::vector<double> d(a.cols(), 1.0);
    if (a.includes_r0_column) d[0] = 0.0;
    return d;
}

linalg::Matrix regularized_gram(const KernelMatrix& a, double lambda) {
    linalg::Matrix g = linalg::gram(a.entries);
    const std::vector<double> d = penalty_diag(a);
    for (std::size_t j = 0; j < g.cols(); ++j) g(j, j) += lambda * d[j];
    return g;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (const double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

linalg::Vector solve_ridge(const KernelMatrix& a, std::span<const double> z, double lambda) {
    if (z.size() != a.rows()) throw ArgumentError("solve_ridge: dimension mismatch");
    if (!(lambda > 0.0)) throw ArgumentError("solve_ridge: lambda must be positive");
    const linalg::Matrix g = regularized_gram(a, lambda);
    const linalg::Vector b = linalg::matvec_transpose(a.entries, z);
    return linalg::solve_spd(g, b);
}

namespace {

// Solve the passive-set subproblem G_PP y = b_P with one refinement pass.
// Returns y indexed like `passive`.
linalg::Vector subproblem_solve(const linalg::Matrix& g, std::span<const double> b,
                                std::span<const std::size_t> passive) {
    const std::size_t p = passive.size();
    linalg::Matrix gpp(p, p);
    linalg::Vector bp(p);
    for (std::size_t r = 0; r < p; ++r) {
        bp[r] = b[passive[r]];
        for (std::size_t c = 0; c < p; ++c) gpp(r, c) = g(passive[r], passive[c]);
    }
    return linalg::solve_spd(gpp, bp);
}

} // namespace

NnlsResult solve_nnls_tikhonov(const KernelMatrix& a, std::span<const double> z, double lambda) {
    if (z.size() != a.rows()) throw ArgumentError("solve_nnls_tikhonov: dimension mismatch");
    if (!(lambda > 0.0)) throw ArgumentError("solve_nnls_tikhonov: lambda must be positive");

    const std::size_t n = a.cols();
    const linalg::Matrix g = linalg::gram(a.entries);
    linalg::Matrix greg = g;
    {
        const std::vector<double> d = penalty_diag(a);
        for (std::size_t j = 0; j < n; ++j) greg(j, j) += lambda * d[j];
    }
    const linalg::Vector b = linalg::matvec_transpose(a.entries, z);

    const double bscale = max_abs(b);
    const double tol = 1e-10 * bscale;
    const int max_iterations = static_cast<int>(10 * n);

    linalg::Vector x(n, 0.0);
    std::vector<std::size_t> passive;
    std::vector<char> in_passive(n, 0);
    linalg::Vector w = b; // b - G x with x = 0
    SolverReport report;

    auto recompute_w = [&]() {
        const linalg::Vector gx = linalg::matvec(greg, x);
        for (std::size_t j = 0; j < n; ++j) w[j] = b[j] - gx[j];
    };

    auto kkt_violation = [&]() {
        double viol = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            viol = std::max(viol, x[j] > 0.0 ? std::abs(w[j]) : std::max(w[j], 0.0));
        }
        return viol;
    };

    bool done = bscale == 0.0; // zero rhs: x = 0 is optimal
    while (!done) {
        std::vector<char> rejected(n, 0);
        linalg::Vector y;
        bool promoted = false;

        // candidate loop: best remaining gradient component, ties to the
        // smallest index; a candidate whose subproblem coefficient fails the
        // positivity test is frozen for this round
        while (!promoted) {
            std::size_t jbest = n;
            double wbest = tol;
            for (std::size_t j = 0; j < n; ++j) {
                if (in_passive[j] || rejected[j]) continue;
                if (w[j] > wbest) {
                    wbest = w[j];
                    jbest = j;
                }
            }
            if (jbest == n) {
                done = true;
                break;
            }

            passive.push_back(jbest);
            bool accept = false;
            try {
                y = subproblem_solve(greg, b, passive);
                ++report.iterations;
                accept = y.back() > 0.0;
            } catch (const NumericError&) {
                accept = false;
            }
            if (accept) {
                in_passive[jbest] = 1;
                promoted = true;
            } else {
                passive.pop_back();
                rejected[jbest] = 1;
            }
            if (report.iterations > max_iterations) {
                recompute_w();
                report.final_kkt_violation = kkt_violation();
                report.active_set_size = static_cast<int>(n - passive.size());
                throw SolverError("nnls: iteration cap exceeded", report);
            }
        }
        if (done) break;

        // inner loop: step toward y, dropping components that hit zero
        while (true) {
            double ymin = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < passive.size(); ++r) ymin = std::min(ymin, y[r]);
            if (ymin > 0.0) {
                for (std::size_t r = 0; r < passive.size(); ++r) x[passive[r]] = y[r];
                break;
            }

            double alpha = 1.0;
            for (std::size_t r = 0; r < passive.size(); ++r) {
                if (y[r] <= 0.0) {
                    const double denom = x[passive[r]] - y[r];
                    const double ratio = denom > 0.0 ? x[passive[r]] / denom : 0.0;
                    alpha = std::min(alpha, ratio);
                }
            }
            for (std::size_t r = 0; r < passive.size(); ++r) {
                const std::size_t j = passive[r];
                x[j] += alpha * (y[r] - x[j]);
            }
            double xmax = 0.0;
            for (const std::size_t j : passive) xmax = std::max(xmax, x[j]);
            const double clamp = 1e-12 * xmax;
            std::vector<std::size_t> keep;
            keep.reserve(passive.size());
            for (std::size_t r = 0; r < passive.size(); ++r) {
                const std::size_t j = passive[r];
                if (y[r] <= 0.0 && x[j] <= clamp) x[j] = 0.0;
                if (x[j] > 0.0) {
                    keep.push_back(j);
                } else {
                    x[j] = 0.0;
                    in_passive[j] = 0;
                }
            }
            passive = std::move(keep);
            if (passive.empty()) {
                y.clear();
                break;
            }
            y = subproblem_solve(greg, b, passive);
            ++report.iterations;
            if (report.iterations > max_iterations) {
                recompute_w();
                report.final_kkt_violation = kkt_violation();
                report.active_set_size = static_cast<int>(n - passive.size());
                throw SolverError("nnls: iteration cap exceeded", report);
            }
        }
        recompute_w();
    }

    recompute_w();
    report.final_kkt_violation = kkt_violation();
    report.active_set_size = static_cast<int>(n - passive.size());
    report.converged = report.final_kkt_violation <= std::max(tol, 1e-8 * bscale);
    return {std::move(x), report};
}

std::vector<double> default_lambda_grid(const KernelMatrix& a, std::size_t count) {
    if (count < 5) throw ArgumentError("default_lambda_grid: need at least 5 points");
    double frob2 = 0.0;
    for (const double v : a.entries.data()) frob2 += v * v;
    const double scale = frob2 / static_cast<double>(a.cols()); // trace(A^T A)/n
    std::vector<double> grid(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double e = -8.0 + 10.0 * static_cast<double>(k) / static_cast<double>(count - 1);
        grid[k] = scale * std::pow(10.0, e);
    }
    return grid;
}

namespace {

struct CurvePointXY {
    double x, y;
};

double chord_distance(const CurvePointXY& p, const CurvePointXY& a, const CurvePointXY& b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len = std::hypot(vx, vy);
    if (len == 0.0) return std::hypot(p.x - a.x, p.y - a.y);
    return std::abs(vx * (p.y - a.y) - vy * (p.x - a.x)) / len;
}

} // namespace

LCurveResult lcurve_select(const KernelMatrix& a, std::span<const double> z,
                           std::span<const double> lambda_grid) {
    if (lambda_grid.size() < 5) {
        throw ArgumentError("lcurve_select: need at least 5 lambda values");
    }
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (!(lambda_grid[i] > 0.0)) throw ArgumentError("lcurve_select: lambdas must be positive");
        if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1])) {
            throw ArgumentError("lcurve_select: lambdas must be strictly increasing");
        }
    }

    const std::size_t k = lambda_grid.size();
    std::vector<LCurvePoint> points(k);
    const bool has_r0 = a.includes_r0_column;
    par::parallel_for(k, [&](std::size_t i) {
        const NnlsResult r = solve_nnls_tikhonov(a, z, lambda_grid[i]);
        const linalg::Vector fit = linalg::matvec_serial(a.entries, r.g);
        double res2 = 0.0;
        for (std::size_t m = 0; m < z.size(); ++m) {
            const double d = fit[m] - z[m];
            res2 += d * d;
        }
        double sol2 = 0.0;
        for (std::size_t j = has_r0 ? 1 : 0; j < r.g.size(); ++j) sol2 += r.g[j] * r.g[j];
        points[i] = {lambda_grid[i], std::sqrt(res2), std::sqrt(sol2)};
    });

    // log-log polyline; zero norms are clamped so the logs stay finite
    std::vector<CurvePointXY> p(k);
    for (std::size_t i = 0; i < k; ++i) {
        p[i] = {std::log10(std::max(points[i].residual_norm, 1e-300)),
                std::log10(std::max(points[i].solution_norm, 1e-300))};
    }

    double span_x = 0.0, span_y = 0.0;
    for (std::size_t i = 1; i < k; ++i) {
        span_x = std::max(span_x, std::abs(p[i].x - p[0].x));
        span_y = std::max(span_y, std::abs(p[i].y - p[0].y));
    }
    const double diag = std::hypot(span_x, span_y);
    double max_chord = 0.0;
    std::size_t chord_best = 0;
    for (std::size_t i = 1; i + 1 < k; ++i) {
        const double d = chord_distance(p[i], p.front(), p.back());
        if (d >= max_chord) {
            max_chord = d;
            chord_best = i;
        }
    }
    if (max_chord <= 1e-12 * std::max(diag, 1e-300)) {
        throw LCurveDegenerateError("lcurve_select: curve is degenerate; widen the lambda grid");
    }

    // Menger curvature on consecutive triples; positive sign marks the corner
    double best_kappa = 0.0;
    std::size_t best_i = k;
    for (std::size_t i = 1; i + 1 < k; ++i) {
        const double ax = p[i].x - p[i - 1].x, ay = p[i].y - p[i - 1].y;
        const double bx = p[i + 1].x - p[i].x, by = p[i + 1].y - p[i].y;
        const double cx = p[i + 1].x - p[i - 1].x, cy = p[i + 1].y - p[i - 1].y;
        const double d1 = std::hypot(ax, ay), d2 = std::hypot(bx, by), d3 = std::hypot(cx, cy);
        if (d1 == 0.0 || d2 == 0.0 || d3 == 0.0) continue;
        const double cross = ax * by - ay * bx;
        const double kappa = 2.0 * cross / (d1 * d2 * d3);
        if (kappa >= best_kappa && kappa > 0.0) {
            best_kappa = kappa;
            best_i = i;
        }
    }
    const std::size_t pick = best_i != k ? best_i : chord_best;
    return {lambda_grid[pick], std::move(points)};
}

FitResult fit_drt(const ImpedanceSpectrum& spectrum, const TimeConstantGrid& tg,
                  const FitOptions& options) {
    const FrequencyGrid& fg = spectrum.freq_grid();
    KernelMatrix a = build_kernel_real(fg, tg, true, KernelWeights::unit);
    std::vector<double> z = spectrum.z_real_ohm();

    if (options.use_imag) {
        const KernelMatrix ki = build_kernel_imag(fg, tg, KernelWeights::unit);
        const std::size_t m = a.rows(), n = tg.size();
        linalg::Matrix stacked(2 * m, n + 1);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n + 1; ++j) stacked(i, j) = a.entries(i, j);
            for (std::size_t j = 0; j < n; ++j) stacked(m + i, j + 1) = ki.entries(i, j);
        }
        a = KernelMatrix{std::move(stacked), true};
        z.insert(z.end(), spectrum.z_imag_ohm().begin(), spectrum.z_imag_ohm().end());
    }

    double lambda = 0.0;
    std::vector<LCurvePoint> lcurve;
    if (options.lambda) {
        if (!(*options.lambda > 0.0)) throw ArgumentError("fit_drt: lambda must be positive");
        lambda = *options.lambda;
    } else {
        const std::vector<double> grid = default_lambda_grid(a, options.lambda_grid_size);
        try {
            LCurveResult sel = lcurve_select(a, z, grid);
            lambda = sel.lambda_star;
            lcurve = std::move(sel.points);
        } catch (const LCurveDegenerateError&) {
            // solution is lambda-independent over the grid; take the midpoint
            lambda = grid[grid.size() / 2];
        }
    }

    NnlsResult nnls = solve_nnls_tikhonov(a, z, lambda);
    const double r0 = nnls.g.front();
    std::vector<double> g(nnls.g.begin() + 1, nnls.g.end());
    DrtSolution sol(tg, std::move(g), r0, lambda);
    return {std::move(sol), nnls.report, std::move(lcurve)};
}

} // namespace drtsoh
