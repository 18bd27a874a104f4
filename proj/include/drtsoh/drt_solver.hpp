#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "drtsoh/eis_model.hpp"
#include "drtsoh/errors.hpp"
#include "drtsoh/linalg.hpp"

namespace drtsoh {

/// One point on the L-curve for a given lambda.
struct LCurvePoint {
    double lambda = 0.0;
    double residual_norm = 0.0; ///< ||A g - z||_2, ohms
    double solution_norm = 0.0; ///< ||g||_2 over the penalized (distribution) part
};

struct SolverReport {
    int iterations = 0;
    bool converged = false;
    int active_set_size = 0;         ///< count of components clamped at zero
    double final_kkt_violation = 0.0; ///< absolute, in units of ||A^T z||
};

/// Thrown when the active-set solver hits its iteration cap.
class SolverError : public NumericError {
public:
    SolverError(const std::string& msg, SolverReport report)
        : NumericError(msg), report(report) {}
    SolverReport report;
};

/// Thrown when every L-curve point coincides (the solution does not depend on
/// lambda over the grid); callers may then pick any grid lambda.
class LCurveDegenerateError : public NumericError {
public:
    using NumericError::NumericError;
};

// Closed-form Tikhonov minimizer of ||A g - z||^2 + lambda ||D g||^2 with no
// sign constraint, where D is the identity except that the R0 column (when
// present) is unpenalized. Serves as oracle and reference for the NNLS path.
linalg::Vector solve_ridge(const KernelMatrix& a, std::span<const double> z, double lambda);

// Nonnegative Tikhonov solve: argmin_{g >= 0} ||A g - z||^2 + lambda ||D g||^2
// via Lawson-Hanson active sets on the normal equations of the lambda-augmented
// system. Deterministic: ties in the entering index go to the smallest index.
struct NnlsResult {
    linalg::Vector g;
    SolverReport report;
};
NnlsResult solve_nnls_tikhonov(const KernelMatrix& a, std::span<const double> z, double lambda);

/// Log-spaced default grid, 1e-8..1e2 in units of trace(A^T A)/cols.
std::vector<double> default_lambda_grid(const KernelMatrix& a, std::size_t count = 25);

// L-curve corner selection over a lambda grid (>= 5 increasing entries).
// The corner is the interior point of maximum Menger curvature of the
// (log residual, log solution) polyline; ties go to the larger lambda. When no
// interior curvature maximum exists, falls back to the point farthest from the
// chord between the curve endpoints.
struct LCurveResult {
    double lambda_star = 0.0;
    std::vector<LCurvePoint> points;
};
LCurveResult lcurve_select(const KernelMatrix& a, std::span<const double> z,
                           std::span<const double> lambda_grid);

struct FitOptions {
    std::optional<double> lambda;  ///< fixed lambda; absent -> L-curve selection
    bool use_imag = false;         ///< stack the imaginary-part rows as well
    std::size_t lambda_grid_size = 25;
};

/// A DRT fit plus its solver diagnostics.
struct FitResult {
    DrtSolution solution;
    SolverReport report;
    std::vector<LCurvePoint> lcurve; ///< empty when lambda was fixed
};

/// Fit a DRT to a spectrum: real-part kernel with R0 column (optionally also
/// the imaginary rows), unit weights, NNLS with L-curve lambda selection.
FitResult fit_drt(const ImpedanceSpectrum& spectrum, const TimeConstantGrid& tg,
                  const FitOptions& options = {});

} // namespace drtsoh
