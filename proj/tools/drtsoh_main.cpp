// drtsoh: synthetic EIS dataset generation, DRT inversion, SOH model training
// and evaluation, and plot-data export.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "drtsoh/drt_solver.hpp"
#include "drtsoh/errors.hpp"
#include "drtsoh/evalharness.hpp"
#include "drtsoh/io.hpp"
#include "drtsoh/parallel.hpp"
#include "drtsoh/plot.hpp"
#include "drtsoh/rng.hpp"
#include "drtsoh/synthetic.hpp"

namespace fs = std::filesystem;
using namespace drtsoh;

namespace {

// JSON config support for --config: top-level keys set global flags, one
// object per subcommand sets that subcommand's flags.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override {
        return "{}\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        try {
            input >> j;
        } catch (const nlohmann::json::exception& e) {
            throw CLI::ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        std::vector<CLI::ConfigItem> items;
        walk(j, {}, items);
        return items;
    }

private:
    static std::string scalar_to_string(const nlohmann::json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }

    static void walk(const nlohmann::json& j, std::vector<std::string> parents,
                     std::vector<CLI::ConfigItem>& items) {
        if (!j.is_object()) throw CLI::ConfigError("config root must be a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (value.is_object()) {
                auto p = parents;
                p.push_back(key);
                walk(value, std::move(p), items);
            } else {
                CLI::ConfigItem item;
                item.parents = parents;
                item.name = key;
                if (value.is_array()) {
                    for (const auto& v : value) item.inputs.push_back(scalar_to_string(v));
                } else {
                    item.inputs.push_back(scalar_to_string(value));
                }
                items.push_back(std::move(item));
            }
        }
    }
};

struct GlobalOpts {
    std::uint64_t seed = 0;
    int jobs = 0;
    bool verbose = false;
};

void vlog(const GlobalOpts& g, const std::string& msg) {
    if (g.verbose) std::cerr << msg << '\n';
}

std::vector<std::string> split_ids(const std::string& csv) {
    std::vector<std::string> ids;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) ids.push_back(item);
    }
    return ids;
}

// ---- synth ------------------------------------------------------------------

struct SynthOpts {
    std::string out_dir;
    double noise_sigma = 0.003;
    double f_min_hz = 1e-2;
    double f_max_hz = 1e4;
    std::size_t n_freq = 60;
    std::size_t n_tau = 81;
    double pad_decades = 1.0;
};

int cmd_synth(const GlobalOpts& g, const SynthOpts& o) {
    DatasetConfig config = DatasetConfig::defaults();
    config.noise_sigma = o.noise_sigma;
    config.f_min_hz = o.f_min_hz;
    config.f_max_hz = o.f_max_hz;
    config.n_freq = o.n_freq;
    config.n_tau = o.n_tau;
    config.pad_decades = o.pad_decades;

    const std::vector<CellRecord> cells = gen_dataset(config, g.seed);
    io::write_dataset(o.out_dir, cells, config, g.seed);

    std::size_t n_spectra = 0;
    for (const auto& c : cells) n_spectra += c.spectra.size();
    std::cout << "wrote " << cells.size() << " cells, " << n_spectra << " spectra to "
              << o.out_dir << '\n';
    return 0;
}

// ---- drt --------------------------------------------------------------------

struct DrtOpts {
    std::vector<std::string> inputs;
    std::string out_dir = ".";
    double lambda = 0.0; // 0 = L-curve selection
    std::string lcurve_out;
    std::size_t n_tau = 81;
    double pad_decades = 1.0;
    bool with_imag = false;
};

int cmd_drt(const GlobalOpts& g, const DrtOpts& o) {
    if (!o.lcurve_out.empty() && o.inputs.size() != 1) {
        throw ArgumentError("--lcurve-out requires exactly one input spectrum");
    }
    if (!o.lcurve_out.empty() && o.lambda > 0.0) {
        throw ArgumentError("--lcurve-out requires L-curve selection (omit --lambda)");
    }

    // parse serially for stable line-numbered errors, then fit in parallel
    FitOptions fo;
    if (o.lambda > 0.0) fo.lambda = o.lambda;
    fo.use_imag = o.with_imag;

    const std::size_t n = o.inputs.size();
    std::vector<ImpedanceSpectrum> spectra;
    std::vector<TimeConstantGrid> grids;
    spectra.reserve(n);
    grids.reserve(n);
    for (const auto& in : o.inputs) {
        spectra.push_back(io::read_eis_csv(in));
        const auto& freqs = spectra.back().freq_grid().freqs_hz();
        const auto [lo, hi] = std::minmax_element(freqs.begin(), freqs.end());
        grids.push_back(build_tau_grid(*lo, *hi, o.n_tau, o.pad_decades));
    }

    std::vector<std::optional<FitResult>> fits(n);
    par::parallel_for(n, [&](std::size_t i) { fits[i].emplace(fit_drt(spectra[i], grids[i], fo)); });

    // write in input order
    for (std::size_t i = 0; i < n; ++i) {
        const fs::path in_path(o.inputs[i]);
        const std::string stem = in_path.stem().string();
        const fs::path csv_path = fs::path(o.out_dir) / (stem + "_drt.csv");
        const fs::path json_path = fs::path(o.out_dir) / (stem + "_drt.json");
        io::write_drt_csv(csv_path, fits[i]->solution);
        io::write_drt_sidecar(json_path, *fits[i], in_path.filename().string());
        vlog(g, "fit " + o.inputs[i] + " -> " + csv_path.string());
        if (!o.lcurve_out.empty()) io::write_lcurve_csv(o.lcurve_out, fits[i]->lcurve);
    }
    std::cout << "fit " << n << " spectra\n";
    return 0;
}

// ---- split options shared by train/eval --------------------------------------

struct SplitOpts {
    std::string kind = "balanced"; // balanced | temperature | random | cells
    double temp_c = 40.0;
    std::size_t k = 4;
    std::uint64_t split_seed = 1;
    std::string test_cells;
};

SplitSpec make_split(const std::vector<CellRecord>& cells, const SplitOpts& s) {
    if (s.kind == "balanced") return make_balanced_split(cells, s.split_seed);
    if (s.kind == "temperature") return make_temperature_split(cells, s.temp_c);
    if (s.kind == "random") return make_random_split(cells, s.k, s.split_seed);
    if (s.kind == "cells") {
        const std::vector<std::string> test = split_ids(s.test_cells);
        if (test.empty()) throw ArgumentError("--test-cells: empty cell list");
        std::set<std::string> known;
        for (const auto& c : cells) known.insert(c.cell_id);
        for (const auto& id : test) {
            if (!known.count(id)) throw ArgumentError("--test-cells: unknown cell " + id);
        }
        SplitSpec spec;
        spec.category = SplitCategory::randomized;
        spec.test_cell_ids = test;
        for (const auto& c : cells) {
            if (std::find(test.begin(), test.end(), c.cell_id) == test.end()) {
                spec.train_cell_ids.push_back(c.cell_id);
            }
        }
        if (spec.train_cell_ids.empty()) throw ArgumentError("--test-cells: no training cells left");
        spec.seed = s.split_seed;
        return spec;
    }
    throw ArgumentError("unknown split kind: " + s.kind);
}

// ---- train ------------------------------------------------------------------

struct TrainOpts {
    std::string manifest;
    std::string out_checkpoint;
    std::string history;
    SplitOpts split;
    int epochs = 400;
    std::size_t batch = 8;
    double lr = 1e-3;
    int patience = 10;
    double fit_lambda = 0.0;
};

int cmd_train(const GlobalOpts& g, const TrainOpts& o) {
    const io::LoadedDataset ds = io::read_dataset(o.manifest);
    const SplitSpec split = make_split(ds.cells, o.split);

    FitDrtOptions fit_opts;
    if (o.fit_lambda > 0.0) fit_opts.lambda = o.fit_lambda;
    vlog(g, "fitting DRT curves at 25% SOC");
    const std::vector<SequenceSample> samples = build_sequence_dataset(ds.cells, fit_opts);

    TrainConfig tc;
    tc.lr0 = o.lr;
    tc.plateau_patience = o.patience;
    tc.max_epochs = o.epochs;
    tc.batch_size = o.batch;
    tc.seed = g.seed;

    const ModelConfig config;
    vlog(g, "training lstm on " + std::to_string(split.train_cell_ids.size()) + " cells");
    const LstmRun run = train_lstm_on_split(samples, split, tc, config);

    io::CheckpointMeta meta;
    meta.category = split_category_name(split.category);
    meta.set_name = o.split.kind;
    meta.test_cell_ids = split.test_cell_ids;
    meta.train_cell_ids = split.train_cell_ids;
    meta.tc = tc;
    io::write_checkpoint(o.out_checkpoint, run.result.model, meta);
    if (!o.history.empty()) io::write_history_csv(o.history, run.result.history);

    const EpochStats& last = run.result.history.back();
    std::cout << "trained " << run.result.history.size() << " epochs, final val mse "
              << io::dtostr(last.val_mse) << ", checkpoint " << o.out_checkpoint << '\n';
    return 0;
}

// ---- eval -------------------------------------------------------------------

struct EvalOpts {
    std::string manifest;
    std::string checkpoint;
    std::string out_results;
    std::string trajectories;
    bool matrix = false;
    std::vector<std::uint64_t> matrix_seeds{0, 1, 2};
    double fit_lambda = 0.0;
    int epochs = 400;
};

int cmd_eval_matrix(const GlobalOpts& g, const EvalOpts& o,
                    const std::vector<SequenceSample>& samples,
                    const std::vector<CellRecord>& cells) {
    const std::vector<ExperimentSpec> specs = default_experiment_specs(cells);
    std::vector<io::ResultRow> rows;
    for (const auto& spec : specs) {
        // seed-median of the per-seed RMSPE for the LSTM; linreg is deterministic
        std::vector<double> rmspe, rmse_ah;
        for (const std::uint64_t seed : o.matrix_seeds) {
            TrainConfig tc;
            tc.seed = Rng::mix(g.seed, seed);
            tc.max_epochs = o.epochs;
            const ExperimentResult r = run_experiment(samples, spec.split, ModelKind::lstm, tc);
            rmspe.push_back(r.rmspe_pct);
            rmse_ah.push_back(r.rmse_ah);
            vlog(g, spec.name + " lstm seed " + std::to_string(seed) + ": rmspe " +
                        io::dtostr(r.rmspe_pct));
        }
        std::vector<double> sorted = rmspe;
        std::sort(sorted.begin(), sorted.end());
        const double med_rmspe = sorted[sorted.size() / 2];
        const std::size_t med_idx = static_cast<std::size_t>(
            std::find(rmspe.begin(), rmspe.end(), med_rmspe) - rmspe.begin());
        rows.push_back({split_category_name(spec.split.category), spec.name, "lstm",
                        rmse_ah[med_idx], med_rmspe});

        TrainConfig tc;
        tc.seed = g.seed;
        const ExperimentResult lin = run_experiment(samples, spec.split, ModelKind::linreg, tc);
        rows.push_back({split_category_name(spec.split.category), spec.name, "linreg",
                        lin.rmse_ah, lin.rmspe_pct});
    }
    io::write_results_csv(o.out_results, rows);
    std::cout << "wrote " << rows.size() << " result rows to " << o.out_results << '\n';
    return 0;
}

int cmd_eval(const GlobalOpts& g, const EvalOpts& o) {
    const io::LoadedDataset ds = io::read_dataset(o.manifest);
    FitDrtOptions fit_opts;
    if (o.fit_lambda > 0.0) fit_opts.lambda = o.fit_lambda;
    const std::vector<SequenceSample> samples = build_sequence_dataset(ds.cells, fit_opts);

    if (o.matrix) return cmd_eval_matrix(g, o, samples, ds.cells);

    if (o.checkpoint.empty()) {
        throw ArgumentError("eval: --checkpoint is required (or use --matrix)");
    }
    const io::LoadedCheckpoint ckpt = io::read_checkpoint(o.checkpoint);

    std::vector<const SequenceSample*> test;
    for (const auto& id : ckpt.meta.test_cell_ids) {
        const auto it = std::find_if(samples.begin(), samples.end(),
                                     [&](const SequenceSample& s) { return s.cell_id == id; });
        if (it == samples.end()) throw DataError("eval: test cell " + id + " not in dataset");
        test.push_back(&*it);
    }
    if (test.empty()) throw DataError("eval: checkpoint lists no test cells");

    std::vector<double> y_all, yhat_all;
    std::vector<CellTrajectory> trajectories;
    for (const auto* s : test) {
        const std::vector<double> est = predict(ckpt.model, *s);
        CellTrajectory traj{s->cell_id, {kCheckupDays, kCheckupDays + 5}, s->targets, est};
        for (std::size_t t = 0; t < est.size(); ++t) {
            y_all.push_back(s->targets[t]);
            yhat_all.push_back(est[t]);
        }
        trajectories.push_back(std::move(traj));
    }
    const double lstm_rmse_ah = rmse(y_all, yhat_all) * kNominalCapacityAh;
    const double lstm_rmspe = rmspe_pct(y_all, yhat_all);

    // linear baseline trained on the checkpoint's training cells
    SplitSpec split;
    split.category = SplitCategory::randomized;
    split.test_cell_ids = ckpt.meta.test_cell_ids;
    split.train_cell_ids = ckpt.meta.train_cell_ids;
    split.seed = ckpt.meta.tc.seed;
    const ExperimentResult lin = run_experiment(samples, split, ModelKind::linreg, ckpt.meta.tc);

    std::vector<io::ResultRow> rows{
        {ckpt.meta.category, ckpt.meta.set_name, "lstm", lstm_rmse_ah, lstm_rmspe},
        {ckpt.meta.category, ckpt.meta.set_name, "linreg", lin.rmse_ah, lin.rmspe_pct}};
    io::write_results_csv(o.out_results, rows);
    if (!o.trajectories.empty()) io::write_trajectories_csv(o.trajectories, trajectories);

    std::cout << "lstm rmspe " << io::dtostr(lstm_rmspe) << "% vs linreg "
              << io::dtostr(lin.rmspe_pct) << "%, results " << o.out_results << '\n';
    return 0;
}

// ---- features ----------------------------------------------------------------

struct FeaturesOpts {
    std::string manifest;
    std::string out_csv;
    int soc_pct = 25; // -1 = all SOCs
    double fit_lambda = 0.0;
};

int cmd_features(const GlobalOpts& g, const FeaturesOpts& o) {
    const io::LoadedDataset ds = io::read_dataset(o.manifest);
    struct Key {
        std::string cell;
        CheckupKey checkup;
    };
    std::vector<Key> keys;
    std::vector<const ImpedanceSpectrum*> spectra;
    for (const auto& cell : ds.cells) {
        for (const auto& [ck, spectrum] : cell.spectra) {
            if (o.soc_pct >= 0 && ck.soc_pct != o.soc_pct) continue;
            keys.push_back({cell.cell_id, ck});
            spectra.push_back(&spectrum);
        }
    }
    if (keys.empty()) throw DataError("features: no spectra match the requested SOC");

    FitOptions fo;
    if (o.fit_lambda > 0.0) fo.lambda = o.fit_lambda;
    std::vector<std::optional<FitResult>> fits(keys.size());
    par::parallel_for(keys.size(), [&](std::size_t i) {
        const auto& freqs = spectra[i]->freq_grid().freqs_hz();
        const auto [lo, hi] = std::minmax_element(freqs.begin(), freqs.end());
        const TimeConstantGrid tg = build_tau_grid(*lo, *hi, 81, 1.0);
        fits[i].emplace(fit_drt(*spectra[i], tg, fo));
    });

    std::vector<io::FeatureRow> rows;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const DrtSolution& sol = fits[i]->solution;
        const BandResistances bands = band_resistances(sol);
        const std::vector<DrtPeak> peaks = find_peaks(sol);
        for (const Band band : {Band::sei, Band::charge_transfer, Band::diffusion}) {
            io::FeatureRow row;
            row.cell_id = keys[i].cell;
            row.day = keys[i].checkup.day;
            row.soc_pct = keys[i].checkup.soc_pct;
            row.band = band;
            row.area_ohm = bands[band];
            for (const auto& p : peaks) {
                if (p.band == band && p.height_ohm_per_s > row.peak_height) {
                    row.peak_tau_s = p.tau_at_max_s;
                    row.peak_height = p.height_ohm_per_s;
                }
            }
            rows.push_back(std::move(row));
        }
    }
    io::write_features_csv(o.out_csv, rows);
    vlog(g, "features from " + std::to_string(keys.size()) + " fits");
    std::cout << "wrote " << rows.size() << " feature rows to " << o.out_csv << '\n';
    return 0;
}

// ---- plotdata ---------------------------------------------------------------

struct PlotOpts {
    std::vector<std::string> drt_inputs;
    std::vector<std::string> lcurve_inputs;
    std::string out_prefix;
    std::string format = "svg"; // svg | csv | both
};

int cmd_plotdata(const GlobalOpts&, const PlotOpts& o) {
    if (o.format != "svg" && o.format != "csv" && o.format != "both") {
        throw ArgumentError("plotdata: --format must be svg, csv, or both");
    }
    if (o.drt_inputs.empty() && o.lcurve_inputs.empty()) {
        std::cerr << "warning: no inputs; writing empty bundle\n";
    }

    std::vector<plot::Series> drt_series;
    for (const auto& in : o.drt_inputs) {
        const io::DrtCurve curve = io::read_drt_csv(in);
        plot::Series s;
        s.label = fs::path(in).stem().string();
        for (std::size_t i = 0; i < curve.tau_s.size(); ++i) {
            s.x.push_back(std::log10(curve.tau_s[i]));
            s.y.push_back(curve.density_ohm_per_s[i]);
        }
        drt_series.push_back(std::move(s));
    }
    std::vector<plot::Series> lcurve_series;
    for (const auto& in : o.lcurve_inputs) {
        const std::vector<LCurvePoint> pts = io::read_lcurve_csv(in);
        plot::Series s;
        s.label = fs::path(in).stem().string();
        for (const auto& p : pts) {
            s.x.push_back(std::log10(std::max(p.residual_norm, 1e-300)));
            s.y.push_back(std::log10(std::max(p.solution_norm, 1e-300)));
        }
        lcurve_series.push_back(std::move(s));
    }

    const bool svg = o.format == "svg" || o.format == "both";
    const bool csv = o.format == "csv" || o.format == "both";
    std::size_t written = 0;
    if (!o.drt_inputs.empty() || o.lcurve_inputs.empty()) {
        plot::PlotOptions po{"log10(tau [s])", "g density [ohm/s]"};
        if (svg) {
            plot::write_svg(o.out_prefix + "_drt.svg", drt_series, po);
            ++written;
        }
        if (csv) {
            plot::write_series_csv(o.out_prefix + "_drt.csv", drt_series);
            ++written;
        }
    }
    if (!lcurve_series.empty()) {
        plot::PlotOptions po{"log10 residual norm", "log10 solution norm"};
        if (svg) {
            plot::write_svg(o.out_prefix + "_lcurve.svg", lcurve_series, po);
            ++written;
        }
        if (csv) {
            plot::write_series_csv(o.out_prefix + "_lcurve.csv", lcurve_series);
            ++written;
        }
    }
    std::cout << "wrote " << written << " plot files with prefix " << o.out_prefix << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DRT-based battery state-of-health estimation toolkit"};
    app.fallthrough(); // global flags may follow the subcommand
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file; command-line flags win");

    GlobalOpts g;
    app.add_option("--seed", g.seed, "master seed; all randomness derives from it");
    app.add_option("--jobs", g.jobs, "worker threads for parallel sections (0 = default)");
    app.add_flag("--verbose", g.verbose, "log progress to stderr");

    SynthOpts synth;
    CLI::App* app_synth = app.add_subcommand("synth", "generate the synthetic 22-cell dataset");
    app_synth->add_option("--out", synth.out_dir, "output directory")->required();
    app_synth->add_option("--noise-sigma", synth.noise_sigma, "multiplicative noise sigma");
    app_synth->add_option("--freq-min", synth.f_min_hz, "lowest EIS frequency [Hz]");
    app_synth->add_option("--freq-max", synth.f_max_hz, "highest EIS frequency [Hz]");
    app_synth->add_option("--freq-points", synth.n_freq, "EIS points per spectrum");
    app_synth->add_option("--tau-points", synth.n_tau, "tau grid size");
    app_synth->add_option("--pad-decades", synth.pad_decades, "tau padding beyond 1/(2 pi f)");

    DrtOpts drt;
    CLI::App* app_drt = app.add_subcommand("drt", "fit DRT curves to EIS spectra");
    app_drt->add_option("inputs", drt.inputs, "EIS CSV files")->required();
    app_drt->add_option("--out", drt.out_dir, "output directory");
    app_drt->add_option("--lambda", drt.lambda, "fixed regularization (skips L-curve)");
    app_drt->add_option("--lcurve-out", drt.lcurve_out, "write the L-curve table (one input)");
    app_drt->add_option("--tau-points", drt.n_tau, "tau grid size");
    app_drt->add_option("--pad-decades", drt.pad_decades, "tau padding beyond 1/(2 pi f)");
    app_drt->add_flag("--with-imag", drt.with_imag, "fit real and imaginary parts jointly");

    TrainOpts train_o;
    CLI::App* app_train = app.add_subcommand("train", "train the LSTM SOH model");
    app_train->add_option("--manifest", train_o.manifest, "dataset manifest.json")->required();
    app_train->add_option("--out", train_o.out_checkpoint, "checkpoint path")->required();
    app_train->add_option("--history", train_o.history, "training history CSV");
    app_train->add_option("--split", train_o.split.kind,
                          "balanced | temperature | random | cells");
    app_train->add_option("--temp", train_o.split.temp_c, "temperature for --split temperature");
    app_train->add_option("--k", train_o.split.k, "test-set size for --split random");
    app_train->add_option("--split-seed", train_o.split.split_seed, "split membership seed");
    app_train->add_option("--test-cells", train_o.split.test_cells,
                          "comma-separated ids for --split cells");
    app_train->add_option("--epochs", train_o.epochs, "training epochs");
    app_train->add_option("--batch", train_o.batch, "minibatch size");
    app_train->add_option("--lr", train_o.lr, "initial learning rate");
    app_train->add_option("--patience", train_o.patience, "plateau patience, epochs");
    app_train->add_option("--fit-lambda", train_o.fit_lambda,
                          "fixed lambda for the DRT fits (default: per-spectrum L-curve)");

    EvalOpts eval_o;
    CLI::App* app_eval = app.add_subcommand("eval", "evaluate SOH models on test cells");
    app_eval->add_option("--manifest", eval_o.manifest, "dataset manifest.json")->required();
    app_eval->add_option("--checkpoint", eval_o.checkpoint, "trained model checkpoint");
    app_eval->add_option("--out", eval_o.out_results, "results CSV")->required();
    app_eval->add_option("--trajectories", eval_o.trajectories, "per-cell trajectory CSV");
    app_eval->add_flag("--matrix", eval_o.matrix, "run the default ten-experiment matrix");
    app_eval->add_option("--matrix-seeds", eval_o.matrix_seeds, "training seeds for --matrix");
    app_eval->add_option("--epochs", eval_o.epochs, "training epochs for --matrix");
    app_eval->add_option("--fit-lambda", eval_o.fit_lambda,
                         "fixed lambda for the DRT fits (default: per-spectrum L-curve)");

    FeaturesOpts feat_o;
    CLI::App* app_feat =
        app.add_subcommand("features", "extract peak/band features from dataset spectra");
    app_feat->add_option("--manifest", feat_o.manifest, "dataset manifest.json")->required();
    app_feat->add_option("--out", feat_o.out_csv, "feature CSV path")->required();
    app_feat->add_option("--soc", feat_o.soc_pct, "SOC filter in percent (-1 = all)");
    app_feat->add_option("--fit-lambda", feat_o.fit_lambda,
                         "fixed lambda for the DRT fits (default: per-spectrum L-curve)");

    PlotOpts plot_o;
    CLI::App* app_plot = app.add_subcommand("plotdata", "render DRT and L-curve plot bundles");
    app_plot->add_option("inputs", plot_o.drt_inputs, "DRT CSV files");
    app_plot->add_option("--lcurve", plot_o.lcurve_inputs, "L-curve CSV files");
    app_plot->add_option("--out", plot_o.out_prefix, "output path prefix")->required();
    app_plot->add_option("--format", plot_o.format, "svg | csv | both");

    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    }

    par::set_threads(g.jobs);

    try {
        if (app_synth->parsed()) return cmd_synth(g, synth);
        if (app_drt->parsed()) return cmd_drt(g, drt);
        if (app_train->parsed()) return cmd_train(g, train_o);
        if (app_eval->parsed()) return cmd_eval(g, eval_o);
        if (app_feat->parsed()) return cmd_features(g, feat_o);
        if (app_plot->parsed()) return cmd_plotdata(g, plot_o);
        std::cerr << "usage error: no subcommand\n";
        return 1;
    } catch (const ArgumentError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
