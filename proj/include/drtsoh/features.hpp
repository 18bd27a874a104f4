#pragma once

#include <string>
#include <vector>

#include "drtsoh/eis_model.hpp"

namespace drtsoh {

// Timescale bands: boundaries at tau = 1e-2 s and 1e0 s, boundary values
// assigned to the lower (smaller-tau) band.
enum class Band { sei, charge_transfer, diffusion };

Band band_of_tau(double tau_s);
std::string band_name(Band b);

/// A local maximum of the DRT curve with its watershed area.
struct DrtPeak {
    double tau_at_max_s = 0.0;
    double height_ohm_per_s = 0.0; ///< density g/dtau at the maximum
    double area_ohm = 0.0;         ///< sum of g over the peak's watershed segment
    Band band = Band::sei;
};

// Peak detection runs on the log-decade density (ohms per decade of tau, the
// view DRT curves are plotted in); per-second density would let fast peaks
// drown out slow ones, since the two views differ by a factor of tau across
// ten decades. Local maxima with prominence >= the threshold are kept; their
// areas partition sum(g) exactly, with segment boundaries at the minimum
// between adjacent accepted peaks. Sorted by tau.
std::vector<DrtPeak> find_peaks(const DrtSolution& sol, double min_prominence_ohm_per_decade);

/// Default prominence threshold: 2% of the maximum log-decade density.
std::vector<DrtPeak> find_peaks(const DrtSolution& sol);

struct BandResistances {
    double sei = 0.0;
    double charge_transfer = 0.0;
    double diffusion = 0.0;

    double operator[](Band b) const;
    double total() const { return sei + charge_transfer + diffusion; }
};

/// Sum g by tau band; the three values partition rp exactly.
BandResistances band_resistances(const DrtSolution& sol);

} // namespace drtsoh
