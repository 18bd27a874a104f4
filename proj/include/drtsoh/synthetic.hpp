#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "drtsoh/eis_model.hpp"

namespace drtsoh {

inline constexpr double kNominalCapacityAh = 5.0;
inline constexpr int kCheckupDays[5] = {0, 10, 20, 40, 90};
inline constexpr int kSocPercents[5] = {0, 25, 50, 75, 100};

enum class AgingKind { calendar, cycling };

/// One row of the operating-condition menu: storage SOC for calendar cells,
/// SOC window + charge rate + cycles/day for cycling cells.
struct OperatingCondition {
    AgingKind aging_kind = AgingKind::calendar;
    double temperature_c = 25.0;
    double soc_low_pct = 0.0;  // calendar cells store the same value in both
    double soc_high_pct = 0.0;
    double charge_crate = 0.0; // 1/h, cycling only
    int cycles_per_day = 0;    // cycling only
};

/// A log-normal component of a synthetic DRT: total mass in ohms placed as a
/// Gaussian in log10(tau).
struct PeakSpec {
    double center_log10_tau = 0.0;
    double height_ohm = 0.0;
    double width_log10 = 0.1;
};

struct CheckupKey {
    int day = 0;
    int soc_pct = 0;
    auto operator<=>(const CheckupKey&) const = default;
};

struct CellRecord {
    std::string cell_id;
    OperatingCondition condition;
    double nominal_capacity_ah = kNominalCapacityAh;
    std::vector<int> checkup_days;
    std::vector<double> capacities_ah;
    std::map<CheckupKey, ImpedanceSpectrum> spectra;
    std::map<CheckupKey, DrtSolution> truth_drt;

    double soh(std::size_t checkup_idx) const {
        return capacities_ah.at(checkup_idx) / nominal_capacity_ah;
    }
};

struct DatasetConfig {
    std::vector<OperatingCondition> conditions; ///< 5 calendar + 17 cycling
    double noise_sigma = 0.003;                 ///< multiplicative, on Z' and Z''
    double f_min_hz = 1e-2;
    double f_max_hz = 1e4;
    std::size_t n_freq = 60;
    std::size_t n_tau = 81;
    double pad_decades = 1.0;

    static DatasetConfig defaults();
};

/// The fixed 22-cell condition table (5 calendar + 17 cycling). The harshest
/// cycling condition (40 C, 0-100%, 1C, 15 cycles/day) is the last entry.
std::vector<OperatingCondition> default_conditions();

// Dimensionless aging-stress scalar shared by the capacity and DRT models:
// sqrt-of-time calendar fade or throughput-driven cycling fade, both with an
// Arrhenius temperature factor and an SOC-window factor. No jitter.
double aging_stress(const OperatingCondition& cond, int day);

/// Discharge capacity in Ah at a checkup day. Seed controls per-cell jitter
/// only; the trend over days is strictly nonincreasing.
double gen_capacity(const OperatingCondition& cond, int day, std::uint64_t seed);

// Synthetic truth peaks for one (condition, day, soc). Three bands; the
// charge-transfer band carries two sub-peaks at 0% SOC. Deterministic in all
// arguments.
std::vector<PeakSpec> gen_truth_drt(const OperatingCondition& cond, int day, int soc_pct,
                                    std::uint64_t seed);

/// Ohmic offset matching the same stress model as gen_truth_drt.
double gen_truth_r0(const OperatingCondition& cond, int day, std::uint64_t seed);

/// Place peak masses on a tau grid; each peak is normalized so its grid mass
/// equals height_ohm exactly.
DrtSolution sample_peaks_on_grid(const std::vector<PeakSpec>& peaks, const TimeConstantGrid& tg,
                                 double r0_ohm);

/// Generate the full 22-cell dataset: capacities, truth DRTs and noisy
/// spectra per checkup/SOC. Deterministic per master_seed; parallel per cell.
std::vector<CellRecord> gen_dataset(const DatasetConfig& config, std::uint64_t master_seed);

} // namespace drtsoh
