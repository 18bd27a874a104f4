#include "drtsoh/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "drtsoh/drt_solver.hpp"
#include "drtsoh/errors.hpp"
#include "drtsoh/parallel.hpp"
#include "drtsoh/rng.hpp"

namespace drtsoh {

std::string split_category_name(SplitCategory c) {
    switch (c) {
        case SplitCategory::balanced: return "balanced";
        case SplitCategory::temperature_based: return "temperature_based";
        case SplitCategory::randomized: return "randomized";
    }
    return "unknown";
}

std::string model_kind_name(ModelKind k) {
    return k == ModelKind::lstm ? "lstm" : "linreg";
}

namespace {

std::vector<std::string> complement_ids(const std::vector<CellRecord>& cells,
                                        const std::vector<std::string>& test_ids) {
    std::set<std::string> test(test_ids.begin(), test_ids.end());
    std::vector<std::string> train;
    for (const auto& c : cells) {
        if (!test.count(c.cell_id)) train.push_back(c.cell_id);
    }
    return train;
}

} // namespace

SplitSpec make_balanced_split(const std::vector<CellRecord>& cells, std::uint64_t seed) {
    const double temps[3] = {0.0, 25.0, 40.0};
    Rng rng(Rng::mix(seed, 0xBA1A));
    std::vector<std::string> test;

    for (const double t : temps) {
        std::vector<std::string> pool;
        for (const auto& c : cells) {
            if (c.condition.aging_kind == AgingKind::cycling && c.condition.temperature_c == t) {
                pool.push_back(c.cell_id);
            }
        }
        if (pool.empty()) {
            throw ArgumentError("balanced split: no cycling cell at " + std::to_string(t) + " C");
        }
        test.push_back(pool[rng.below(pool.size())]);
    }
    std::vector<std::string> calendar;
    for (const auto& c : cells) {
        if (c.condition.aging_kind == AgingKind::calendar) calendar.push_back(c.cell_id);
    }
    if (calendar.empty()) throw ArgumentError("balanced split: no calendar cell in dataset");
    test.push_back(calendar[rng.below(calendar.size())]);

    return {SplitCategory::balanced, test, complement_ids(cells, test), seed};
}

SplitSpec make_temperature_split(const std::vector<CellRecord>& cells, double temp_c) {
    std::vector<std::string> test;
    for (const auto& c : cells) {
        if (c.condition.temperature_c == temp_c) test.push_back(c.cell_id);
    }
    if (test.empty()) {
        throw ArgumentError("temperature split: no cells at " + std::to_string(temp_c) + " C");
    }
    if (test.size() == cells.size()) {
        throw ArgumentError("temperature split: no training cells left");
    }
    return {SplitCategory::temperature_based, test, complement_ids(cells, test),
            static_cast<std::uint64_t>(temp_c)};
}

SplitSpec make_random_split(const std::vector<CellRecord>& cells, std::size_t k,
                            std::uint64_t seed) {
    if (k == 0 || k >= cells.size()) {
        throw ArgumentError("random split: k must be in [1, cell count)");
    }
    std::vector<std::size_t> idx(cells.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng rng(Rng::mix(seed, 0xD07));
    shuffle(idx, rng);
    std::vector<std::string> test;
    for (std::size_t i = 0; i < k; ++i) test.push_back(cells[idx[i]].cell_id);
    std::sort(test.begin(), test.end());
    return {SplitCategory::randomized, test, complement_ids(cells, test), seed};
}

std::vector<SequenceSample> build_sequence_dataset(const std::vector<CellRecord>& cells,
                                                   const FitDrtOptions& options) {
    if (cells.empty()) throw ArgumentError("build_sequence_dataset: empty dataset");
    const std::size_t n_cells = cells.size();
    const std::size_t n_days = cells.front().checkup_days.size();

    // one fit per (cell, checkup); all fits share the cell's tau grid
    std::vector<SequenceSample> samples(n_cells);
    for (auto& s : samples) s.inputs.resize(n_days);

    par::parallel_for(n_cells * n_days, [&](std::size_t job) {
        const std::size_t ci = job / n_days;
        const std::size_t di = job % n_days;
        const CellRecord& cell = cells[ci];
        const int day = cell.checkup_days[di];
        const auto it = cell.spectra.find({day, options.soc_pct});
        if (it == cell.spectra.end()) {
            throw DataError("build_sequence_dataset: missing spectrum for " + cell.cell_id);
        }
        const auto truth = cell.truth_drt.find({day, options.soc_pct});
        const auto& freqs = it->second.freq_grid().freqs_hz();
        const auto [fmin_it, fmax_it] = std::minmax_element(freqs.begin(), freqs.end());
        const TimeConstantGrid tg = truth != cell.truth_drt.end()
            ? truth->second.tau_grid()
            : build_tau_grid(*fmin_it, *fmax_it, 81, 1.0);
        FitOptions fo;
        fo.lambda = options.lambda;
        const FitResult fit = fit_drt(it->second, tg, fo);
        linalg::Vector x = fit.solution.density_ohm_per_s();
        if (options.log_density) {
            for (double& v : x) v = std::log10(v + 1e-9);
        }
        samples[ci].inputs[di] = std::move(x);
    });

    for (std::size_t ci = 0; ci < n_cells; ++ci) {
        samples[ci].cell_id = cells[ci].cell_id;
        samples[ci].targets.resize(n_days);
        for (std::size_t di = 0; di < n_days; ++di) samples[ci].targets[di] = cells[ci].soh(di);
    }
    return samples;
}

namespace {

// Pooled least squares from input vector to SOH with intercept, solved via
// normal equations with a small diagonal stabilizer (the pooled design is
// rank-deficient on the smaller training splits).
struct LinregModel {
    linalg::Vector weights; // last entry is the intercept
    Normalizer norm;
};

LinregModel fit_linreg(const std::vector<const SequenceSample*>& train) {
    const Normalizer norm = [&] {
        std::vector<SequenceSample> copy;
        for (const auto* s : train) copy.push_back(*s);
        return Normalizer::fit(copy);
    }();

    const std::size_t d = train.front()->inputs.front().size();
    const std::size_t p = d + 1;
    linalg::Matrix gram(p, p, 0.0);
    linalg::Vector rhs(p, 0.0);
    for (const auto* s : train) {
        for (std::size_t t = 0; t < s->inputs.size(); ++t) {
            linalg::Vector x = norm.apply(s->inputs[t]);
            x.push_back(1.0);
            const double y = s->targets[t];
            for (std::size_t i = 0; i < p; ++i) {
                rhs[i] += x[i] * y;
                for (std::size_t j = 0; j < p; ++j) gram(i, j) += x[i] * x[j];
            }
        }
    }
    // just enough diagonal to keep the factorization alive when the pooled
    // design is rank-deficient; the baseline stays ordinary least squares
    double trace = 0.0;
    for (std::size_t i = 0; i < p; ++i) trace += gram(i, i);
    const double eps = 1e-8 * trace / static_cast<double>(p) + 1e-300;
    for (std::size_t i = 0; i < p; ++i) gram(i, i) += eps;
    return {linalg::solve_spd(gram, rhs), norm};
}

double predict_linreg(const LinregModel& m, const linalg::Vector& input) {
    linalg::Vector x = m.norm.apply(input);
    x.push_back(1.0);
    return linalg::dot(x, m.weights);
}

} // namespace

LstmRun train_lstm_on_split(const std::vector<SequenceSample>& samples, const SplitSpec& split,
                            const TrainConfig& tc, const ModelConfig& config) {
    std::map<std::string, const SequenceSample*> by_id;
    for (const auto& s : samples) by_id[s.cell_id] = &s;
    std::vector<const SequenceSample*> train_samples;
    for (const auto& id : split.train_cell_ids) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) throw ArgumentError("train_lstm_on_split: unknown cell " + id);
        train_samples.push_back(it->second);
    }
    if (train_samples.size() < 2) {
        throw ArgumentError("train_lstm_on_split: need at least two training cells");
    }

    // hold out one training cell as the plateau-scheduler validation set: the
    // cell with the median SOH drop, so the schedule tracks a representative
    // trajectory rather than an extreme one
    std::vector<std::size_t> order(train_samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto drop = [&](std::size_t i) {
            return train_samples[i]->targets.front() - train_samples[i]->targets.back();
        };
        if (drop(a) != drop(b)) return drop(a) < drop(b);
        return train_samples[a]->cell_id < train_samples[b]->cell_id;
    });
    const std::size_t val_idx = order[order.size() / 2];
    std::vector<SequenceSample> train_set, val_set;
    for (std::size_t i = 0; i < train_samples.size(); ++i) {
        (i == val_idx ? val_set : train_set).push_back(*train_samples[i]);
    }
    return {train(config, train_set, val_set, tc), train_samples[val_idx]->cell_id};
}

ExperimentResult run_experiment(const std::vector<SequenceSample>& samples,
                                const SplitSpec& split, ModelKind kind, const TrainConfig& tc,
                                const ModelConfig& config) {
    std::map<std::string, const SequenceSample*> by_id;
    for (const auto& s : samples) by_id[s.cell_id] = &s;
    for (const auto& id : split.test_cell_ids) {
        if (!by_id.count(id)) throw ArgumentError("run_experiment: unknown test cell " + id);
    }

    std::vector<const SequenceSample*> train_samples, test_samples;
    for (const auto& id : split.train_cell_ids) train_samples.push_back(by_id.at(id));
    for (const auto& id : split.test_cell_ids) test_samples.push_back(by_id.at(id));
    if (train_samples.empty() || test_samples.empty()) {
        throw ArgumentError("run_experiment: empty train or test split");
    }

    ExperimentResult result;
    std::vector<double> y_all, yhat_all;

    auto record = [&](const SequenceSample& s, const std::vector<double>& est) {
        CellTrajectory traj;
        traj.cell_id = s.cell_id;
        traj.days.assign(kCheckupDays, kCheckupDays + 5);
        traj.true_soh = s.targets;
        traj.est_soh = est;
        for (std::size_t t = 0; t < s.targets.size(); ++t) {
            y_all.push_back(s.targets[t]);
            yhat_all.push_back(est[t]);
        }
        result.trajectories.push_back(std::move(traj));
    };

    if (kind == ModelKind::lstm) {
        LstmRun run = train_lstm_on_split(samples, split, tc, config);
        result.history = std::move(run.result.history);
        for (const auto* s : test_samples) record(*s, predict(run.result.model, *s));
    } else {
        const LinregModel lm = fit_linreg(train_samples);
        for (const auto* s : test_samples) {
            std::vector<double> est(s->inputs.size());
            for (std::size_t t = 0; t < s->inputs.size(); ++t) {
                est[t] = predict_linreg(lm, s->inputs[t]);
            }
            record(*s, est);
        }
    }

    result.rmse_soh = rmse(y_all, yhat_all);
    result.rmse_ah = result.rmse_soh * kNominalCapacityAh;
    result.rmspe_pct = rmspe_pct(y_all, yhat_all);
    return result;
}

std::vector<ExperimentSpec> default_experiment_specs(const std::vector<CellRecord>& cells) {
    std::vector<ExperimentSpec> specs;
    specs.push_back({"balanced-1", make_balanced_split(cells, 11)});
    specs.push_back({"balanced-2", make_balanced_split(cells, 12)});
    specs.push_back({"balanced-3", make_balanced_split(cells, 13)});
    specs.push_back({"temperature-0C", make_temperature_split(cells, 0.0)});
    specs.push_back({"temperature-25C", make_temperature_split(cells, 25.0)});
    specs.push_back({"temperature-40C", make_temperature_split(cells, 40.0)});
    specs.push_back({"random-1", make_random_split(cells, 4, 21)});
    specs.push_back({"random-2", make_random_split(cells, 4, 22)});
    specs.push_back({"random-3", make_random_split(cells, 4, 23)});
    specs.push_back({"random-half", make_random_split(cells, 11, 24)});
    return specs;
}

} // namespace drtsoh
