#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drtsoh/soh_model.hpp"
#include "drtsoh/synthetic.hpp"

namespace drtsoh {

enum class SplitCategory { balanced, temperature_based, randomized };

std::string split_category_name(SplitCategory c);

/// A train/test partition of the cell set. Construction validates the
/// category rules; nothing downstream re-checks them.
struct SplitSpec {
    SplitCategory category = SplitCategory::randomized;
    std::vector<std::string> test_cell_ids;
    std::vector<std::string> train_cell_ids;
    std::uint64_t seed = 0;
};

/// Four test cells: one cycling cell per temperature plus one calendar cell.
SplitSpec make_balanced_split(const std::vector<CellRecord>& cells, std::uint64_t seed);

/// Every cell (calendar and cycling) at one temperature forms the test set.
SplitSpec make_temperature_split(const std::vector<CellRecord>& cells, double temp_c);

/// Uniform k-subset without replacement; k=11 gives the half/half scenario.
SplitSpec make_random_split(const std::vector<CellRecord>& cells, std::size_t k,
                            std::uint64_t seed);

enum class ModelKind { lstm, linreg };

std::string model_kind_name(ModelKind k);

struct FitDrtOptions {
    std::optional<double> lambda; ///< fixed lambda skips per-spectrum L-curve
    int soc_pct = 25;
    // Feed log10(density + 1e-9) instead of the raw density. The density
    // spans six orders of magnitude across the tau axis and its standardized
    // raw values are heavy-tailed; the log view trains far more reliably.
    bool log_density = true;
};

// One sequence sample per cell: per-checkup DRT curves at the chosen SOC
// (fitted from the spectra, log-density view by default) and per-checkup SOH
// targets. Fits run in parallel across spectra.
std::vector<SequenceSample> build_sequence_dataset(const std::vector<CellRecord>& cells,
                                                   const FitDrtOptions& options = {});

struct CellTrajectory {
    std::string cell_id;
    std::vector<int> days;
    std::vector<double> true_soh;
    std::vector<double> est_soh;
};

struct ExperimentResult {
    double rmse_soh = 0.0;
    double rmse_ah = 0.0; ///< rmse_soh * 5.0 exactly
    double rmspe_pct = 0.0;
    std::vector<CellTrajectory> trajectories;
    std::vector<EpochStats> history; ///< LSTM only
};

/// An LSTM training run on a split's training cells, with the held-out
/// validation cell identified.
struct LstmRun {
    TrainResult result;
    std::string val_cell_id;
};
LstmRun train_lstm_on_split(const std::vector<SequenceSample>& samples, const SplitSpec& split,
                            const TrainConfig& tc, const ModelConfig& config = {});

// Train the chosen model on the split's training cells (the LSTM holds out
// one training cell as its validation set) and evaluate per-checkup SOH on
// the test cells. Deterministic given (split, tc.seed).
ExperimentResult run_experiment(const std::vector<SequenceSample>& samples,
                                const SplitSpec& split, ModelKind kind, const TrainConfig& tc,
                                const ModelConfig& config = {});

struct ExperimentSpec {
    std::string name;
    SplitSpec split;
};

/// The default ten-experiment matrix: 3 balanced, 3 temperature-based,
/// 4 randomized (three k=4 and one half/half k=11).
std::vector<ExperimentSpec> default_experiment_specs(const std::vector<CellRecord>& cells);

} // namespace drtsoh
