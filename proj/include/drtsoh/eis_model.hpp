#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "drtsoh/linalg.hpp"

namespace drtsoh {

/// Measurement frequencies in Hz: all positive, strictly monotone
/// (descending or ascending), at least two points.
class FrequencyGrid {
public:
    explicit FrequencyGrid(std::vector<double> freqs_hz);

    static FrequencyGrid log_spaced(double f_min_hz, double f_max_hz, std::size_t m,
                                    bool descending = true);

    const std::vector<double>& freqs_hz() const { return freqs_hz_; }
    std::size_t size() const { return freqs_hz_.size(); }
    bool descending() const { return freqs_hz_.front() > freqs_hz_.back(); }

    /// omega = 2 pi f, in rad/s, same ordering as freqs_hz.
    std::vector<double> angular() const;

private:
    std::vector<double> freqs_hz_;
};

/// Relaxation-time grid: strictly increasing taus with positive quadrature
/// widths. The default builder produces uniform log10 spacing.
class TimeConstantGrid {
public:
    TimeConstantGrid(std::vector<double> taus_s, std::vector<double> dtaus_s);

    const std::vector<double>& taus_s() const { return taus_s_; }
    const std::vector<double>& dtaus_s() const { return dtaus_s_; }
    std::size_t size() const { return taus_s_.size(); }

private:
    std::vector<double> taus_s_;
    std::vector<double> dtaus_s_;
};

/// Log-uniform tau grid covering [1/(2 pi f_max), 1/(2 pi f_min)] widened by
/// pad_decades on each side, with trapezoid widths in linear tau.
TimeConstantGrid build_tau_grid(double f_min_hz, double f_max_hz, std::size_t n,
                                double pad_decades);

/// One measured spectrum: Z'(f) and Z''(f) on a frequency grid.
class ImpedanceSpectrum {
public:
    ImpedanceSpectrum(FrequencyGrid freq_grid, std::vector<double> z_real_ohm,
                      std::vector<double> z_imag_ohm);

    const FrequencyGrid& freq_grid() const { return freq_grid_; }
    const std::vector<double>& z_real_ohm() const { return z_real_ohm_; }
    const std::vector<double>& z_imag_ohm() const { return z_imag_ohm_; }
    std::size_t size() const { return z_real_ohm_.size(); }

private:
    FrequencyGrid freq_grid_;
    std::vector<double> z_real_ohm_;
    std::vector<double> z_imag_ohm_;
};

// Kernel weighting. `dtau` carries the quadrature width in the matrix entry;
// `unit` drops it, for the convention where the width is absorbed into g so
// that g has units of ohms and Rp = sum(g).
enum class KernelWeights { dtau, unit };

/// Discretized forward operator. With the R0 column the matrix is
/// m x (n + 1) and the leading column is all ones.
struct KernelMatrix {
    linalg::Matrix entries;
    bool includes_r0_column = false;

    std::size_t rows() const { return entries.rows(); }
    std::size_t cols() const { return entries.cols(); }
};

// Real-part kernel: entry = w_n / (1 + (omega_m tau_n)^2) with w_n = dtau_n
// or 1 depending on the weighting. Entries lie in (0, w_n].
KernelMatrix build_kernel_real(const FrequencyGrid& fg, const TimeConstantGrid& tg,
                               bool with_r0, KernelWeights weights = KernelWeights::dtau);
KernelMatrix build_kernel_real_serial(const FrequencyGrid& fg, const TimeConstantGrid& tg,
                                      bool with_r0,
                                      KernelWeights weights = KernelWeights::dtau);

// Imaginary-part kernel: entry = -omega_m tau_n w_n / (1 + (omega_m tau_n)^2).
// Entries are <= 0; no R0 column (R0 does not contribute to Z'').
KernelMatrix build_kernel_imag(const FrequencyGrid& fg, const TimeConstantGrid& tg,
                               KernelWeights weights = KernelWeights::dtau);
KernelMatrix build_kernel_imag_serial(const FrequencyGrid& fg, const TimeConstantGrid& tg,
                                      KernelWeights weights = KernelWeights::dtau);

/// A fitted or synthesized DRT: nonnegative g (ohms, width-absorbed) on a tau
/// grid plus the ohmic offset. rp is fixed to sum(g) at construction.
class DrtSolution {
public:
    DrtSolution(TimeConstantGrid tau_grid, std::vector<double> g_ohm, double r0_ohm,
                double lambda);

    const TimeConstantGrid& tau_grid() const { return tau_grid_; }
    const std::vector<double>& g_ohm() const { return g_ohm_; }
    double r0_ohm() const { return r0_ohm_; }
    double rp_ohm() const { return rp_ohm_; }
    double lambda() const { return lambda_; }
    std::size_t size() const { return g_ohm_.size(); }

    /// Density view g / dtau in ohm/s (the natural plotting units).
    std::vector<double> density_ohm_per_s() const;

private:
    TimeConstantGrid tau_grid_;
    std::vector<double> g_ohm_;
    double r0_ohm_;
    double rp_ohm_;
    double lambda_;
};

/// Evaluate the RC-network model of a solution on a frequency grid:
/// Z' = R0 + K_real g, Z'' = K_imag g with unit-weight kernels.
ImpedanceSpectrum forward_model(const DrtSolution& sol, const FrequencyGrid& fg);

} // namespace drtsoh
