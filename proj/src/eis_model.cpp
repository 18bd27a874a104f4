#include "drtsoh/eis_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "drtsoh/errors.hpp"
#include "drtsoh/parallel.hpp"

namespace drtsoh {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

FrequencyGrid::FrequencyGrid(std::vector<double> freqs_hz) : freqs_hz_(std::move(freqs_hz)) {
    if (freqs_hz_.size() < 2) throw ArgumentError("frequency grid needs at least 2 points");
    const bool desc = freqs_hz_.front() > freqs_hz_.back();
    for (std::size_t i = 0; i < freqs_hz_.size(); ++i) {
        const double f = freqs_hz_[i];
        if (!(f > 0.0) || !std::isfinite(f)) {
            throw ArgumentError("frequency grid entries must be positive and finite");
        }
        if (i > 0) {
            const bool ok = desc ? freqs_hz_[i] < freqs_hz_[i - 1] : freqs_hz_[i] > freqs_hz_[i - 1];
            if (!ok) throw ArgumentError("frequency grid must be strictly monotone");
        }
    }
}

FrequencyGrid FrequencyGrid::log_spaced(double f_min_hz, double f_max_hz, std::size_t m,
                                        bool descending) {
    if (!(f_min_hz > 0.0) || !(f_max_hz > f_min_hz)) {
        throw ArgumentError("log_spaced: need 0 < f_min < f_max");
    }
    if (m < 2) throw ArgumentError("log_spaced: need m >= 2");
    const double lo = std::log10(f_min_hz);
    const double hi = std::log10(f_max_hz);
    std::vector<double> f(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(m - 1);
        const double lg = descending ? hi + (lo - hi) * t : lo + (hi - lo) * t;
        f[i] = std::pow(10.0, lg);
    }
    return FrequencyGrid(std::move(f));
}

std::vector<double> FrequencyGrid::angular() const {
    std::vector<double> w(freqs_hz_.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = kTwoPi * freqs_hz_[i];
    return w;
}

TimeConstantGrid::TimeConstantGrid(std::vector<double> taus_s, std::vector<double> dtaus_s)
    : taus_s_(std::move(taus_s)), dtaus_s_(std::move(dtaus_s)) {
    if (taus_s_.size() < 2) throw ArgumentError("tau grid needs at least 2 points");
    if (taus_s_.size() != dtaus_s_.size()) {
        throw ArgumentError("tau grid: taus and widths must have equal length");
    }
    for (std::size_t i = 0; i < taus_s_.size(); ++i) {
        if (!(taus_s_[i] > 0.0) || !std::isfinite(taus_s_[i])) {
            throw ArgumentError("tau grid entries must be positive and finite");
        }
        if (i > 0 && !(taus_s_[i] > taus_s_[i - 1])) {
            throw ArgumentError("tau grid must be strictly increasing");
        }
        if (!(dtaus_s_[i] > 0.0)) throw ArgumentError("tau grid widths must be positive");
    }
}

TimeConstantGrid build_tau_grid(double f_min_hz, double f_max_hz, std::size_t n,
                                double pad_decades) {
    if (!(f_min_hz > 0.0) || !(f_max_hz > f_min_hz)) {
        throw ArgumentError("build_tau_grid: need 0 < f_min < f_max");
    }
    if (n < 2) throw ArgumentError("build_tau_grid: need n >= 2");
    if (pad_decades < 0.0) throw ArgumentError("build_tau_grid: pad_decades must be >= 0");

    const double lg_lo = std::log10(1.0 / (kTwoPi * f_max_hz)) - pad_decades;
    const double lg_hi = std::log10(1.0 / (kTwoPi * f_min_hz)) + pad_decades;
    std::vector<double> taus(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        taus[i] = std::pow(10.0, lg_lo + (lg_hi - lg_lo) * t);
    }
    // trapezoid widths in linear tau
    std::vector<double> dtaus(n);
    dtaus[0] = 0.5 * (taus[1] - taus[0]);
    for (std::size_t i = 1; i + 1 < n; ++i) dtaus[i] = 0.5 * (taus[i + 1] - taus[i - 1]);
    dtaus[n - 1] = 0.5 * (taus[n - 1] - taus[n - 2]);
    return TimeConstantGrid(std::move(taus), std::move(dtaus));
}

ImpedanceSpectrum::ImpedanceSpectrum(FrequencyGrid freq_grid, std::vector<double> z_real_ohm,
                                     std::vector<double> z_imag_ohm)
    : freq_grid_(std::move(freq_grid)),
      z_real_ohm_(std::move(z_real_ohm)),
      z_imag_ohm_(std::move(z_imag_ohm)) {
    if (z_real_ohm_.size() != freq_grid_.size() || z_imag_ohm_.size() != freq_grid_.size()) {
        throw ArgumentError("impedance spectrum: component lengths must match the grid");
    }
    for (std::size_t i = 0; i < z_real_ohm_.size(); ++i) {
        if (!std::isfinite(z_real_ohm_[i]) || !std::isfinite(z_imag_ohm_[i])) {
            throw ArgumentError("impedance spectrum entries must be finite");
        }
    }
}

namespace {

template <class Loop>
KernelMatrix fill_kernel_real(const FrequencyGrid& fg, const TimeConstantGrid& tg, bool with_r0,
                              KernelWeights weights, Loop&& loop) {
    const std::vector<double> omega = fg.angular();
    const auto& taus = tg.taus_s();
    const auto& dtaus = tg.dtaus_s();
    const std::size_t m = fg.size();
    const std::size_t n = tg.size();
    const std::size_t off = with_r0 ? 1 : 0;

    KernelMatrix k{linalg::Matrix(m, n + off), with_r0};
    loop(m, [&](std::size_t i) {
        auto row = k.entries.row(i);
        if (with_r0) row[0] = 1.0;
        const double w = omega[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double wt = w * taus[j];
            const double scale = weights == KernelWeights::dtau ? dtaus[j] : 1.0;
            row[j + off] = scale / (1.0 + wt * wt);
        }
    });
    return k;
}

template <class Loop>
KernelMatrix fill_kernel_imag(const FrequencyGrid& fg, const TimeConstantGrid& tg,
                              KernelWeights weights, Loop&& loop) {
    const std::vector<double> omega = fg.angular();
    const auto& taus = tg.taus_s();
    const auto& dtaus = tg.dtaus_s();
    const std::size_t m = fg.size();
    const std::size_t n = tg.size();

    KernelMatrix k{linalg::Matrix(m, n), false};
    loop(m, [&](std::size_t i) {
        auto row = k.entries.row(i);
        const double w = omega[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double wt = w * taus[j];
            const double scale = weights == KernelWeights::dtau ? dtaus[j] : 1.0;
            row[j] = -wt * scale / (1.0 + wt * wt);
        }
    });
    return k;
}

} // namespace

KernelMatrix build_kernel_real(const FrequencyGrid& fg, const TimeConstantGrid& tg, bool with_r0,
                               KernelWeights weights) {
    return fill_kernel_real(fg, tg, with_r0, weights,
                            [](std::size_t n, auto&& f) { par::parallel_for(n, f); });
}

KernelMatrix build_kernel_real_serial(const FrequencyGrid& fg, const TimeConstantGrid& tg,
                                      bool with_r0, KernelWeights weights) {
    return fill_kernel_real(fg, tg, with_r0, weights,
                            [](std::size_t n, auto&& f) { par::serial_for(n, f); });
}

KernelMatrix build_kernel_imag(const FrequencyGrid& fg, const TimeConstantGrid& tg,
                               KernelWeights weights) {
    return fill_kernel_imag(fg, tg, weights,
                            [](std::size_t n, auto&& f) { par::parallel_for(n, f); });
}

KernelMatrix build_kernel_imag_serial(const FrequencyGrid& fg, const TimeConstantGrid& tg,
                                      KernelWeights weights) {
    return fill_kernel_imag(fg, tg, weights,
                            [](std::size_t n, auto&& f) { par::serial_for(n, f); });
}

DrtSolution::DrtSolution(TimeConstantGrid tau_grid, std::vector<double> g_ohm, double r0_ohm,
                         double lambda)
    : tau_grid_(std::move(tau_grid)), g_ohm_(std::move(g_ohm)), r0_ohm_(r0_ohm), lambda_(lambda) {
    if (g_ohm_.size() != tau_grid_.size()) {
        throw ArgumentError("drt solution: g length must match the tau grid");
    }
    if (!(r0_ohm_ >= 0.0) || !std::isfinite(r0_ohm_)) {
        throw ArgumentError("drt solution: r0 must be nonnegative and finite");
    }
    if (lambda_ < 0.0 || !std::isfinite(lambda_)) {
        throw ArgumentError("drt solution: lambda must be nonnegative and finite");
    }
    double rp = 0.0;
    for (const double g : g_ohm_) {
        if (!(g >= 0.0) || !std::isfinite(g)) {
            throw ArgumentError("drt solution: g must be nonnegative and finite");
        }
        rp += g;
    }
    rp_ohm_ = rp;
}

std::vector<double> DrtSolution::density_ohm_per_s() const {
    std::vector<double> d(g_ohm_.size());
    const auto& dtaus = tau_grid_.dtaus_s();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = g_ohm_[i] / dtaus[i];
    return d;
}

ImpedanceSpectrum forward_model(const DrtSolution& sol, const FrequencyGrid& fg) {
    if (sol.size() != sol.tau_grid().size()) {
        throw ArgumentError("forward_model: solution/grid mismatch");
    }
    const KernelMatrix kr = build_kernel_real(fg, sol.tau_grid(), false, KernelWeights::unit);
    const KernelMatrix ki = build_kernel_imag(fg, sol.tau_grid(), KernelWeights::unit);
    std::vector<double> zr = linalg::matvec(kr.entries, sol.g_ohm());
    std::vector<double> zi = linalg::matvec(ki.entries, sol.g_ohm());
    for (double& v : zr) v += sol.r0_ohm();
    return ImpedanceSpectrum(fg, std::move(zr), std::move(zi));
}

} // namespace drtsoh
