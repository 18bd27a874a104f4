#include "drtsoh/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace drtsoh {

Band band_of_tau(double tau_s) {
    if (tau_s <= 1e-2) return Band::sei;
    if (tau_s <= 1e0) return Band::charge_transfer;
    return Band::diffusion;
}

std::string band_name(Band b) {
    switch (b) {
        case Band::sei: return "sei";
        case Band::charge_transfer: return "charge_transfer";
        case Band::diffusion: return "diffusion";
    }
    return "unknown";
}

double BandResistances::operator[](Band b) const {
    switch (b) {
        case Band::sei: return sei;
        case Band::charge_transfer: return charge_transfer;
        case Band::diffusion: return diffusion;
    }
    return 0.0;
}

namespace {

// prominence of a local maximum: height above the higher of the two key
// saddles, walking outward until a strictly taller sample or the edge
double prominence_at(const std::vector<double>& d, std::size_t i) {
    double left_min = d[i];
    for (std::size_t k = i; k-- > 0;) {
        if (d[k] > d[i]) break;
        left_min = std::min(left_min, d[k]);
    }
    double right_min = d[i];
    for (std::size_t k = i + 1; k < d.size(); ++k) {
        if (d[k] > d[i]) break;
        right_min = std::min(right_min, d[k]);
    }
    return d[i] - std::max(left_min, right_min);
}

} // namespace

namespace {

// g per decade of tau: dtau = ln(10) * tau * dlog10(tau)
std::vector<double> density_per_decade(const DrtSolution& sol) {
    const auto& g = sol.g_ohm();
    const auto& taus = sol.tau_grid().taus_s();
    const auto& dtaus = sol.tau_grid().dtaus_s();
    std::vector<double> d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        d[i] = g[i] * std::numbers::ln10 * taus[i] / dtaus[i];
    }
    return d;
}

} // namespace

std::vector<DrtPeak> find_peaks(const DrtSolution& sol, double min_prominence_ohm_per_decade) {
    const std::vector<double> d = density_per_decade(sol);
    const std::vector<double> dens_s = sol.density_ohm_per_s();
    const auto& taus = sol.tau_grid().taus_s();
    const auto& g = sol.g_ohm();
    const std::size_t n = d.size();

    std::vector<std::size_t> maxima;
    for (std::size_t i = 0; i < n; ++i) {
        const bool left_ok = i == 0 || d[i] > d[i - 1];
        const bool right_ok = i + 1 == n || d[i] > d[i + 1];
        if (left_ok && right_ok && d[i] > 0.0) maxima.push_back(i);
    }

    std::vector<std::size_t> accepted;
    for (const std::size_t i : maxima) {
        if (prominence_at(d, i) >= min_prominence_ohm_per_decade) accepted.push_back(i);
    }
    if (accepted.empty()) return {};

    // watershed boundaries at the minimum between adjacent accepted peaks;
    // the boundary index joins the left segment
    std::vector<std::size_t> seg_end(accepted.size(), n - 1);
    for (std::size_t k = 0; k + 1 < accepted.size(); ++k) {
        std::size_t bmin = accepted[k];
        for (std::size_t i = accepted[k] + 1; i < accepted[k + 1]; ++i) {
            if (d[i] < d[bmin]) bmin = i;
        }
        seg_end[k] = bmin;
    }

    std::vector<DrtPeak> peaks;
    std::size_t seg_begin = 0;
    for (std::size_t k = 0; k < accepted.size(); ++k) {
        const std::size_t i = accepted[k];
        DrtPeak p;
        p.tau_at_max_s = taus[i];
        p.height_ohm_per_s = dens_s[i];
        p.band = band_of_tau(taus[i]);
        double area = 0.0;
        for (std::size_t j = seg_begin; j <= seg_end[k]; ++j) area += g[j];
        p.area_ohm = area;
        peaks.push_back(p);
        seg_begin = seg_end[k] + 1;
    }
    return peaks;
}

std::vector<DrtPeak> find_peaks(const DrtSolution& sol) {
    const std::vector<double> d = density_per_decade(sol);
    const double dmax = d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
    return find_peaks(sol, 0.02 * dmax);
}

BandResistances band_resistances(const DrtSolution& sol) {
    BandResistances br;
    const auto& taus = sol.tau_grid().taus_s();
    const auto& g = sol.g_ohm();
    for (std::size_t i = 0; i < g.size(); ++i) {
        switch (band_of_tau(taus[i])) {
            case Band::sei: br.sei += g[i]; break;
            case Band::charge_transfer: br.charge_transfer += g[i]; break;
            case Band::diffusion: br.diffusion += g[i]; break;
        }
    }
    return br;
}

} // namespace drtsoh
