#include "drtsoh/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drtsoh/errors.hpp"
#include "drtsoh/parallel.hpp"
#include "drtsoh/rng.hpp"

namespace drtsoh {

namespace {

// Model constants, tuned once so the qualitative degradation envelope holds:
// the harshest cycling condition reaches ~65% SOH at day 90, calendar cells
// stay above 5.2 Ah, and degradation trajectories overlap across
// temperatures (SOC window and cycle count matter as much as temperature).
constexpr double kDay0CapacityAh = 5.45;
constexpr double kDay0JitterRel = 0.005;
constexpr double kRateJitterRel = 0.03;
constexpr double kEaOverRKelvin = 800.0;
constexpr double kCalendarPerSqrtDay = 1.5e-3;
constexpr double kCyclingPerAh = 2.504e-5;
constexpr double kCapacityFloorAh = 0.5 * kNominalCapacityAh;
// saturating peak growth: g(s) = s / (s + knee). Heights respond steeply to
// early aging and flatten later, so the height-to-SOH map stays curved over
// the whole stress range.
constexpr double kPeakGrowthKnee = 0.15;

double peak_growth(double s) { return s / (s + kPeakGrowthKnee); }

// rng stream salts
constexpr std::uint64_t kSaltCapacity = 0xCA90;
constexpr std::uint64_t kSaltPeaks = 0x9EA6;
constexpr std::uint64_t kSaltNoise = 0x0153;

double arrhenius(double temp_c) {
    return std::exp(-kEaOverRKelvin * (1.0 / (temp_c + 273.15) - 1.0 / 298.15));
}

bool valid_checkup_day(int day) {
    for (const int d : kCheckupDays)
        if (d == day) return true;
    return false;
}

bool valid_soc(int soc) {
    for (const int s : kSocPercents)
        if (s == soc) return true;
    return false;
}

// symmetric per-cell jitter in [-1, 1]
double jitter_unit(std::uint64_t seed, std::uint64_t salt) {
    Rng rng(Rng::mix(seed, salt));
    return 2.0 * rng.uniform() - 1.0;
}

// overall impedance scale of a cell, +-10%
double cell_scale(std::uint64_t seed) {
    return 1.0 + 0.03 * jitter_unit(seed, kSaltPeaks + 7);
}

} // namespace

std::vector<OperatingCondition> default_conditions() {
    using AK = AgingKind;
    std::vector<OperatingCondition> v;
    // 5 calendar cells: storage SOC x temperature
    v.push_back({AK::calendar, 0.0, 80.0, 80.0, 0.0, 0});
    v.push_back({AK::calendar, 25.0, 80.0, 80.0, 0.0, 0});
    v.push_back({AK::calendar, 40.0, 80.0, 80.0, 0.0, 0});
    v.push_back({AK::calendar, 25.0, 100.0, 100.0, 0.0, 0});
    v.push_back({AK::calendar, 40.0, 100.0, 100.0, 0.0, 0});
    // 17 cycling cells spanning the menu; the harshest condition is last
    v.push_back({AK::cycling, 0.0, 0.0, 80.0, 0.2, 4});
    v.push_back({AK::cycling, 0.0, 0.0, 80.0, 1.0, 5});
    v.push_back({AK::cycling, 0.0, 10.0, 90.0, 0.2, 4});
    v.push_back({AK::cycling, 0.0, 10.0, 90.0, 1.0, 12});
    v.push_back({AK::cycling, 0.0, 0.0, 100.0, 0.2, 4});
    v.push_back({AK::cycling, 0.0, 0.0, 100.0, 1.0, 15});
    v.push_back({AK::cycling, 25.0, 0.0, 80.0, 0.2, 5});
    v.push_back({AK::cycling, 25.0, 0.0, 80.0, 1.0, 12});
    v.push_back({AK::cycling, 25.0, 10.0, 90.0, 0.2, 4});
    v.push_back({AK::cycling, 25.0, 10.0, 90.0, 1.0, 12});
    v.push_back({AK::cycling, 25.0, 0.0, 100.0, 0.2, 5});
    v.push_back({AK::cycling, 25.0, 0.0, 100.0, 1.0, 15});
    v.push_back({AK::cycling, 40.0, 0.0, 80.0, 0.2, 4});
    v.push_back({AK::cycling, 40.0, 0.0, 80.0, 1.0, 12});
    v.push_back({AK::cycling, 40.0, 10.0, 90.0, 0.2, 5});
    v.push_back({AK::cycling, 40.0, 10.0, 90.0, 1.0, 15});
    v.push_back({AK::cycling, 40.0, 0.0, 100.0, 1.0, 15});
    return v;
}

DatasetConfig DatasetConfig::defaults() {
    DatasetConfig c;
    c.conditions = default_conditions();
    return c;
}

double aging_stress(const OperatingCondition& cond, int day) {
    if (day < 0) throw ArgumentError("aging_stress: day must be >= 0");
    const double arr = arrhenius(cond.temperature_c);
    if (cond.aging_kind == AgingKind::calendar) {
        const double soc_factor = std::pow(cond.soc_high_pct / 100.0, 2.0);
        return kCalendarPerSqrtDay * arr * soc_factor * std::sqrt(static_cast<double>(day));
    }
    const double dod = (cond.soc_high_pct - cond.soc_low_pct) / 100.0;
    const double high_voltage_factor = std::pow(cond.soc_high_pct / 100.0, 3.0);
    const double crate_factor = 0.8 + 0.25 * cond.charge_crate;
    const double throughput_ah =
        2.0 * dod * kNominalCapacityAh * cond.cycles_per_day * static_cast<double>(day);
    return kCyclingPerAh * arr * high_voltage_factor * crate_factor * throughput_ah;
}

namespace {

// the one stress value a cell sees at a checkup: the condition stress with
// the cell's rate jitter. Drives capacity AND the truth DRT, so the spectra
// stay informative of the labels.
double cell_stress(const OperatingCondition& cond, int day, std::uint64_t seed) {
    const double rate_jitter = 1.0 + kRateJitterRel * jitter_unit(seed, kSaltCapacity + 1);
    return aging_stress(cond, day) * rate_jitter;
}

} // namespace

double gen_capacity(const OperatingCondition& cond, int day, std::uint64_t seed) {
    if (day < 0) throw ArgumentError("gen_capacity: day must be >= 0");
    const double c0 = kDay0CapacityAh * (1.0 + kDay0JitterRel * jitter_unit(seed, kSaltCapacity));
    const double fade = cell_stress(cond, day, seed);
    return std::max(c0 * (1.0 - fade), kCapacityFloorAh);
}

namespace {

// SOC magnitude factor: impedance is largest at 0% SOC.
double soc_magnitude(int soc_pct) {
    const double depth = (100.0 - soc_pct) / 100.0;
    return 1.0 + 0.9 * depth * depth;
}

} // namespace

std::vector<PeakSpec> gen_truth_drt(const OperatingCondition& cond, int day, int soc_pct,
                                    std::uint64_t seed) {
    if (!valid_checkup_day(day)) throw ArgumentError("gen_truth_drt: day not in checkup schedule");
    if (!valid_soc(soc_pct)) throw ArgumentError("gen_truth_drt: soc not in EIS schedule");

    const double s = cell_stress(cond, day, seed);
    const double sg = peak_growth(s);
    const double mag = soc_magnitude(soc_pct);
    // cell-to-cell impedance scale spread (one factor for the whole cell,
    // fixed across days) plus a small per-band jitter. Absolute heights alone
    // therefore do not pin the SOH; positions and within-cell ratios do.
    const double scale = cell_scale(seed);
    const double j_sei = scale * (1.0 + 0.01 * jitter_unit(seed, kSaltPeaks));
    const double j_ct = scale * (1.0 + 0.01 * jitter_unit(seed, kSaltPeaks + 1));
    const double j_diff = scale * (1.0 + 0.01 * jitter_unit(seed, kSaltPeaks + 2));

    std::vector<PeakSpec> peaks;

    // SEI/CEI: grows with stress and shifts toward smaller tau
    peaks.push_back({-2.35 - 0.45 * s, (0.0045 + 0.020 * sg) * mag * j_sei, 0.30 * (1.0 + 0.3 * s)});

    if (soc_pct == 0) {
        // charge transfer splits into two sub-peaks at 0% SOC
        peaks.push_back({-1.35 - 0.2 * s, (0.0040 + 0.0028 * sg) * mag * j_ct, 0.24 * (1.0 + 0.3 * s)});
        peaks.push_back({-0.55 - 0.2 * s, (0.0050 + 0.0036 * sg) * mag * j_ct, 0.24 * (1.0 + 0.3 * s)});
    } else {
        peaks.push_back({-0.75 - 0.2 * s, (0.0060 + 0.0042 * sg) * mag * j_ct, 0.30 * (1.0 + 0.3 * s)});
    }

    // diffusion: grows at low/mid SOC, shrinks mildly at 75/100%
    const double diff_height = soc_pct <= 50 ? (0.0080 + 0.0080 * sg) : 0.0080 * (1.0 - 0.30 * s);
    peaks.push_back({0.55, std::max(diff_height, 0.0) * mag * j_diff, 0.34});
    return peaks;
}

double gen_truth_r0(const OperatingCondition& cond, int day, std::uint64_t seed) {
    const double s = cell_stress(cond, day, seed);
    const double j = 1.0 + 0.02 * jitter_unit(seed, kSaltPeaks + 3);
    return 0.012 * (1.0 + 0.25 * s) * cell_scale(seed) * j;
}

DrtSolution sample_peaks_on_grid(const std::vector<PeakSpec>& peaks, const TimeConstantGrid& tg,
                                 double r0_ohm) {
    const std::size_t n = tg.size();
    std::vector<double> g(n, 0.0);
    std::vector<double> lg(n);
    for (std::size_t i = 0; i < n; ++i) lg[i] = std::log10(tg.taus_s()[i]);

    std::vector<double> shape(n);
    for (const PeakSpec& p : peaks) {
        if (p.height_ohm < 0.0 || !(p.width_log10 > 0.0)) {
            throw ArgumentError("sample_peaks_on_grid: invalid peak spec");
        }
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double zscore = (lg[i] - p.center_log10_tau) / p.width_log10;
            shape[i] = std::exp(-0.5 * zscore * zscore);
            total += shape[i];
        }
        if (total <= 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) g[i] += p.height_ohm * shape[i] / total;
    }
    return DrtSolution(tg, std::move(g), r0_ohm, 0.0);
}

std::vector<CellRecord> gen_dataset(const DatasetConfig& config, std::uint64_t master_seed) {
    const std::size_t n_cells = config.conditions.size();
    if (n_cells != 22) {
        throw ArgumentError("gen_dataset: condition table must list exactly 22 cells");
    }
    std::size_t n_calendar = 0;
    for (const auto& c : config.conditions) {
        if (c.aging_kind == AgingKind::calendar) ++n_calendar;
    }
    if (n_calendar != 5) {
        throw ArgumentError("gen_dataset: condition table must contain 5 calendar cells");
    }
    if (!(config.noise_sigma >= 0.0)) throw ArgumentError("gen_dataset: negative noise sigma");

    const FrequencyGrid fg =
        FrequencyGrid::log_spaced(config.f_min_hz, config.f_max_hz, config.n_freq, true);
    const TimeConstantGrid tg =
        build_tau_grid(config.f_min_hz, config.f_max_hz, config.n_tau, config.pad_decades);

    std::vector<CellRecord> cells(n_cells);
    par::parallel_for(n_cells, [&](std::size_t ci) {
        const OperatingCondition& cond = config.conditions[ci];
        const std::uint64_t cell_seed = Rng::mix(master_seed, ci);

        CellRecord cell;
        cell.cell_id = "S" + std::to_string(ci + 1);
        cell.condition = cond;
        for (const int day : kCheckupDays) {
            cell.checkup_days.push_back(day);
            cell.capacities_ah.push_back(gen_capacity(cond, day, cell_seed));
            for (const int soc : kSocPercents) {
                const std::vector<PeakSpec> peaks = gen_truth_drt(cond, day, soc, cell_seed);
                const double r0 = gen_truth_r0(cond, day, cell_seed);
                DrtSolution truth = sample_peaks_on_grid(peaks, tg, r0);
                ImpedanceSpectrum clean = forward_model(truth, fg);

                std::vector<double> zr = clean.z_real_ohm();
                std::vector<double> zi = clean.z_imag_ohm();
                if (config.noise_sigma > 0.0) {
                    Rng noise(Rng::mix(cell_seed, kSaltNoise + 1000 * day + soc));
                    for (std::size_t i = 0; i < zr.size(); ++i) {
                        zr[i] *= 1.0 + config.noise_sigma * noise.normal();
                        zi[i] *= 1.0 + config.noise_sigma * noise.normal();
                    }
                }
                const CheckupKey key{day, soc};
                cell.spectra.emplace(key, ImpedanceSpectrum(fg, std::move(zr), std::move(zi)));
                cell.truth_drt.emplace(key, std::move(truth));
            }
        }
        cells[ci] = std::move(cell);
    });
    return cells;
}

} // namespace drtsoh
