#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "drtsoh/drt_solver.hpp"
#include "drtsoh/eis_model.hpp"
#include "drtsoh/evalharness.hpp"
#include "drtsoh/features.hpp"
#include "drtsoh/soh_model.hpp"
#include "drtsoh/synthetic.hpp"

namespace drtsoh::io {

/// Shortest text that round-trips a double exactly (17 significant digits).
std::string dtostr(double v);

// ---- EIS spectra -----------------------------------------------------------
// CSV with header `freq_hz,z_real_ohm,z_imag_ohm`, one spectrum per file,
// rows in descending frequency.

void write_eis_csv(const std::filesystem::path& path, const ImpedanceSpectrum& spectrum);
ImpedanceSpectrum read_eis_csv(const std::filesystem::path& path);

// ---- DRT fits --------------------------------------------------------------

void write_drt_csv(const std::filesystem::path& path, const DrtSolution& sol);

/// Rows of a DRT CSV; enough to replot without the quadrature widths.
struct DrtCurve {
    std::vector<double> tau_s, g_ohm, density_ohm_per_s;
};
DrtCurve read_drt_csv(const std::filesystem::path& path);

/// JSON sidecar with r0, rp, lambda and the solver report.
void write_drt_sidecar(const std::filesystem::path& path, const FitResult& fit,
                       const std::string& source_name);

void write_lcurve_csv(const std::filesystem::path& path,
                      const std::vector<LCurvePoint>& points);
std::vector<LCurvePoint> read_lcurve_csv(const std::filesystem::path& path);

// ---- synthetic dataset on disk ----------------------------------------------

struct SpectrumTruth {
    double r0_ohm = 0.0;
    double rp_ohm = 0.0;
};

struct LoadedDataset {
    std::vector<CellRecord> cells; ///< truth_drt left empty (not serialized)
    std::map<std::pair<std::string, CheckupKey>, SpectrumTruth> truth;
    double noise_sigma = 0.0;
    std::uint64_t master_seed = 0;
};

/// Write manifest.json plus one spectrum CSV per (cell, day, soc) under
/// dir/spectra/. Creates directories as needed.
void write_dataset(const std::filesystem::path& dir, const std::vector<CellRecord>& cells,
                   const DatasetConfig& config, std::uint64_t master_seed);

LoadedDataset read_dataset(const std::filesystem::path& manifest_path);

// ---- model checkpoints -------------------------------------------------------

struct CheckpointMeta {
    std::string category = "custom";
    std::string set_name = "custom";
    std::vector<std::string> test_cell_ids;
    std::vector<std::string> train_cell_ids;
    TrainConfig tc;
};

// JSON checkpoint: config, normalizer and the flat parameter array in
// tensor_list() order (per LSTM layer: w_input row-major, w_recur row-major,
// bias; then per FC layer: w row-major, b).
void write_checkpoint(const std::filesystem::path& path, const SohModel& model,
                      const CheckpointMeta& meta);

struct LoadedCheckpoint {
    SohModel model;
    CheckpointMeta meta;
};
LoadedCheckpoint read_checkpoint(const std::filesystem::path& path);

// ---- reporting CSVs ----------------------------------------------------------

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochStats>& history);

struct ResultRow {
    std::string category;
    std::string set_name;
    std::string model;
    double rmse_ah = 0.0;
    double rmspe_pct = 0.0;
};
void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows);

void write_trajectories_csv(const std::filesystem::path& path,
                            const std::vector<CellTrajectory>& trajectories);

struct FeatureRow {
    std::string cell_id;
    int day = 0;
    int soc_pct = 0;
    Band band = Band::sei;
    double area_ohm = 0.0;
    double peak_tau_s = 0.0;
    double peak_height = 0.0;
};
void write_features_csv(const std::filesystem::path& path, const std::vector<FeatureRow>& rows);

} // namespace drtsoh::io
