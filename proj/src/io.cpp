#include "drtsoh/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "drtsoh/errors.hpp"

namespace drtsoh::io {

using nlohmann::json;
namespace fs = std::filesystem;

std::string dtostr(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open for reading: " + path.string());
    return in;
}

double parse_double(const std::string& field, const fs::path& path, std::size_t line_no) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw DataError(path.string() + ":" + std::to_string(line_no) +
                        ": cannot parse number '" + field + "'");
    }
    return v;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

// shared reader for fixed-width numeric CSVs with an exact header
std::vector<std::vector<double>> read_numeric_csv(const fs::path& path,
                                                  const std::string& header) {
    std::ifstream in = open_in(path);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) {
        throw DataError(path.string() + ":1: expected header '" + header + "'");
    }
    const std::size_t n_fields = split_fields(header).size();

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != n_fields) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(n_fields) + " fields, got " +
                            std::to_string(fields.size()));
        }
        std::vector<double> row(n_fields);
        for (std::size_t i = 0; i < n_fields; ++i) row[i] = parse_double(fields[i], path, line_no);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

void write_eis_csv(const fs::path& path, const ImpedanceSpectrum& spectrum) {
    std::ofstream out = open_out(path);
    out << "freq_hz,z_real_ohm,z_imag_ohm\n";
    const auto& f = spectrum.freq_grid().freqs_hz();
    const auto& zr = spectrum.z_real_ohm();
    const auto& zi = spectrum.z_imag_ohm();
    // interface fixes descending frequency order
    if (spectrum.freq_grid().descending()) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            out << dtostr(f[i]) << ',' << dtostr(zr[i]) << ',' << dtostr(zi[i]) << '\n';
        }
    } else {
        for (std::size_t i = f.size(); i-- > 0;) {
            out << dtostr(f[i]) << ',' << dtostr(zr[i]) << ',' << dtostr(zi[i]) << '\n';
        }
    }
}

ImpedanceSpectrum read_eis_csv(const fs::path& path) {
    const auto rows = read_numeric_csv(path, "freq_hz,z_real_ohm,z_imag_ohm");
    if (rows.size() < 2) throw DataError(path.string() + ": need at least 2 spectrum rows");
    std::vector<double> f(rows.size()), zr(rows.size()), zi(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        f[i] = rows[i][0];
        zr[i] = rows[i][1];
        zi[i] = rows[i][2];
    }
    try {
        return ImpedanceSpectrum(FrequencyGrid(std::move(f)), std::move(zr), std::move(zi));
    } catch (const ArgumentError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_drt_csv(const fs::path& path, const DrtSolution& sol) {
    std::ofstream out = open_out(path);
    out << "tau_s,g_ohm,g_density_ohm_per_s\n";
    const auto& taus = sol.tau_grid().taus_s();
    const auto& g = sol.g_ohm();
    const std::vector<double> d = sol.density_ohm_per_s();
    for (std::size_t i = 0; i < taus.size(); ++i) {
        out << dtostr(taus[i]) << ',' << dtostr(g[i]) << ',' << dtostr(d[i]) << '\n';
    }
}

DrtCurve read_drt_csv(const fs::path& path) {
    const auto rows = read_numeric_csv(path, "tau_s,g_ohm,g_density_ohm_per_s");
    DrtCurve c;
    for (const auto& r : rows) {
        c.tau_s.push_back(r[0]);
        c.g_ohm.push_back(r[1]);
        c.density_ohm_per_s.push_back(r[2]);
    }
    return c;
}

namespace {

json report_to_json(const SolverReport& r) {
    return json{{"iterations", r.iterations},
                {"converged", r.converged},
                {"active_set_size", r.active_set_size},
                {"final_kkt_violation", r.final_kkt_violation}};
}

} // namespace

void write_drt_sidecar(const fs::path& path, const FitResult& fit, const std::string& source_name) {
    json j{{"schema_version", 1},
           {"source", source_name},
           {"r0_ohm", fit.solution.r0_ohm()},
           {"rp_ohm", fit.solution.rp_ohm()},
           {"lambda", fit.solution.lambda()},
           {"solver_report", report_to_json(fit.report)}};
    if (!fit.lcurve.empty()) {
        json pts = json::array();
        for (const auto& p : fit.lcurve) {
            pts.push_back({{"lambda", p.lambda},
                           {"residual_norm", p.residual_norm},
                           {"solution_norm", p.solution_norm}});
        }
        j["lcurve"] = std::move(pts);
    }
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_lcurve_csv(const fs::path& path, const std::vector<LCurvePoint>& points) {
    std::ofstream out = open_out(path);
    out << "lambda,residual_norm,solution_norm\n";
    for (const auto& p : points) {
        out << dtostr(p.lambda) << ',' << dtostr(p.residual_norm) << ','
            << dtostr(p.solution_norm) << '\n';
    }
}

std::vector<LCurvePoint> read_lcurve_csv(const fs::path& path) {
    const auto rows = read_numeric_csv(path, "lambda,residual_norm,solution_norm");
    std::vector<LCurvePoint> pts;
    for (const auto& r : rows) pts.push_back({r[0], r[1], r[2]});
    return pts;
}

namespace {

std::string spectrum_filename(const std::string& cell_id, int day, int soc) {
    return cell_id + "_d" + std::to_string(day) + "_soc" + std::to_string(soc) + ".csv";
}

} // namespace

void write_dataset(const fs::path& dir, const std::vector<CellRecord>& cells,
                   const DatasetConfig& config, std::uint64_t master_seed) {
    fs::create_directories(dir / "spectra");

    json jcells = json::array();
    for (const auto& cell : cells) {
        json jc{{"cell_id", cell.cell_id},
                {"aging_kind", cell.condition.aging_kind == AgingKind::calendar ? "calendar"
                                                                                : "cycling"},
                {"temperature_c", cell.condition.temperature_c},
                {"soc_low_pct", cell.condition.soc_low_pct},
                {"soc_high_pct", cell.condition.soc_high_pct},
                {"charge_crate", cell.condition.charge_crate},
                {"cycles_per_day", cell.condition.cycles_per_day},
                {"nominal_capacity_ah", cell.nominal_capacity_ah},
                {"checkup_days", cell.checkup_days},
                {"capacities_ah", cell.capacities_ah}};
        json jspectra = json::array();
        for (const auto& [key, spectrum] : cell.spectra) {
            const std::string name = spectrum_filename(cell.cell_id, key.day, key.soc_pct);
            write_eis_csv(dir / "spectra" / name, spectrum);
            json js{{"day", key.day}, {"soc_pct", key.soc_pct}, {"path", "spectra/" + name}};
            const auto truth = cell.truth_drt.find(key);
            if (truth != cell.truth_drt.end()) {
                js["truth_r0_ohm"] = truth->second.r0_ohm();
                js["truth_rp_ohm"] = truth->second.rp_ohm();
            }
            jspectra.push_back(std::move(js));
        }
        jc["spectra"] = std::move(jspectra);
        jcells.push_back(std::move(jc));
    }

    const json manifest{{"schema_version", 1},
                        {"master_seed", master_seed},
                        {"noise_sigma", config.noise_sigma},
                        {"f_min_hz", config.f_min_hz},
                        {"f_max_hz", config.f_max_hz},
                        {"n_freq", config.n_freq},
                        {"n_tau", config.n_tau},
                        {"pad_decades", config.pad_decades},
                        {"cells", jcells}};
    std::ofstream out = open_out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
}

namespace {

json parse_json_file(const fs::path& path) {
    std::ifstream in = open_in(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return j;
}

} // namespace

LoadedDataset read_dataset(const fs::path& manifest_path) {
    const json manifest = parse_json_file(manifest_path);
    const fs::path dir = manifest_path.parent_path();
    LoadedDataset ds;
    try {
        if (manifest.at("schema_version").get<int>() != 1) {
            throw DataError(manifest_path.string() + ": unsupported schema_version");
        }
        ds.master_seed = manifest.at("master_seed").get<std::uint64_t>();
        ds.noise_sigma = manifest.at("noise_sigma").get<double>();
        for (const auto& jc : manifest.at("cells")) {
            CellRecord cell;
            cell.cell_id = jc.at("cell_id").get<std::string>();
            cell.condition.aging_kind = jc.at("aging_kind").get<std::string>() == "calendar"
                                            ? AgingKind::calendar
                                            : AgingKind::cycling;
            cell.condition.temperature_c = jc.at("temperature_c").get<double>();
            cell.condition.soc_low_pct = jc.at("soc_low_pct").get<double>();
            cell.condition.soc_high_pct = jc.at("soc_high_pct").get<double>();
            cell.condition.charge_crate = jc.at("charge_crate").get<double>();
            cell.condition.cycles_per_day = jc.at("cycles_per_day").get<int>();
            cell.nominal_capacity_ah = jc.at("nominal_capacity_ah").get<double>();
            cell.checkup_days = jc.at("checkup_days").get<std::vector<int>>();
            cell.capacities_ah = jc.at("capacities_ah").get<std::vector<double>>();
            for (const auto& js : jc.at("spectra")) {
                const CheckupKey key{js.at("day").get<int>(), js.at("soc_pct").get<int>()};
                cell.spectra.emplace(key,
                                     read_eis_csv(dir / js.at("path").get<std::string>()));
                if (js.contains("truth_r0_ohm")) {
                    ds.truth[{cell.cell_id, key}] = {js.at("truth_r0_ohm").get<double>(),
                                                     js.at("truth_rp_ohm").get<double>()};
                }
            }
            ds.cells.push_back(std::move(cell));
        }
    } catch (const json::exception& e) {
        throw DataError(manifest_path.string() + ": " + e.what());
    }
    return ds;
}

namespace {

json train_config_to_json(const TrainConfig& tc) {
    return json{{"lr0", tc.lr0},
                {"plateau_factor", tc.plateau_factor},
                {"plateau_patience", tc.plateau_patience},
                {"plateau_min_delta", tc.plateau_min_delta},
                {"min_lr", tc.min_lr},
                {"adam_beta1", tc.adam_beta1},
                {"adam_beta2", tc.adam_beta2},
                {"adam_eps", tc.adam_eps},
                {"max_epochs", tc.max_epochs},
                {"batch_size", tc.batch_size},
                {"seed", tc.seed}};
}

TrainConfig train_config_from_json(const json& j) {
    TrainConfig tc;
    tc.lr0 = j.at("lr0").get<double>();
    tc.plateau_factor = j.at("plateau_factor").get<double>();
    tc.plateau_patience = j.at("plateau_patience").get<int>();
    tc.plateau_min_delta = j.at("plateau_min_delta").get<double>();
    tc.min_lr = j.at("min_lr").get<double>();
    tc.adam_beta1 = j.at("adam_beta1").get<double>();
    tc.adam_beta2 = j.at("adam_beta2").get<double>();
    tc.adam_eps = j.at("adam_eps").get<double>();
    tc.max_epochs = j.at("max_epochs").get<int>();
    tc.batch_size = j.at("batch_size").get<std::size_t>();
    tc.seed = j.at("seed").get<std::uint64_t>();
    return tc;
}

} // namespace

void write_checkpoint(const fs::path& path, const SohModel& model, const CheckpointMeta& meta) {
    const ModelConfig& cfg = model.params.config;
    json j{{"schema_version", 1},
           {"config",
            {{"input_dim", cfg.input_dim},
             {"lstm_hidden", cfg.lstm_hidden},
             {"fc_dims", cfg.fc_dims},
             {"selu_alpha", cfg.selu_alpha},
             {"selu_scale", cfg.selu_scale}}},
           {"param_count", model.params.param_count()},
           {"params", model.params.flatten()},
           {"normalizer", {{"mean", model.norm.mean}, {"stddev", model.norm.stddev}}},
           {"meta",
            {{"category", meta.category},
             {"set_name", meta.set_name},
             {"test_cell_ids", meta.test_cell_ids},
             {"train_cell_ids", meta.train_cell_ids},
             {"train_config", train_config_to_json(meta.tc)}}}};
    std::ofstream out = open_out(path);
    out << j.dump() << '\n';
}

LoadedCheckpoint read_checkpoint(const fs::path& path) {
    const json j = parse_json_file(path);
    try {
        if (j.at("schema_version").get<int>() != 1) {
            throw DataError(path.string() + ": unsupported schema_version");
        }
        ModelConfig cfg;
        const json& jc = j.at("config");
        cfg.input_dim = jc.at("input_dim").get<std::size_t>();
        cfg.lstm_hidden = jc.at("lstm_hidden").get<std::array<std::size_t, 3>>();
        cfg.fc_dims = jc.at("fc_dims").get<std::array<std::size_t, 3>>();
        cfg.selu_alpha = jc.at("selu_alpha").get<double>();
        cfg.selu_scale = jc.at("selu_scale").get<double>();

        const std::vector<double> flat = j.at("params").get<std::vector<double>>();
        SohModelParams params = SohModelParams::from_flat(cfg, flat);
        if (j.at("param_count").get<std::size_t>() != params.param_count()) {
            throw DataError(path.string() + ": param_count mismatch");
        }
        Normalizer norm{j.at("normalizer").at("mean").get<std::vector<double>>(),
                        j.at("normalizer").at("stddev").get<std::vector<double>>()};

        CheckpointMeta meta;
        const json& jm = j.at("meta");
        meta.category = jm.at("category").get<std::string>();
        meta.set_name = jm.at("set_name").get<std::string>();
        meta.test_cell_ids = jm.at("test_cell_ids").get<std::vector<std::string>>();
        meta.train_cell_ids = jm.at("train_cell_ids").get<std::vector<std::string>>();
        meta.tc = train_config_from_json(jm.at("train_config"));
        return {{std::move(params), std::move(norm)}, std::move(meta)};
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_history_csv(const fs::path& path, const std::vector<EpochStats>& history) {
    std::ofstream out = open_out(path);
    out << "epoch,train_mse,val_mse,lr\n";
    for (const auto& h : history) {
        out << h.epoch << ',' << dtostr(h.train_mse) << ',' << dtostr(h.val_mse) << ','
            << dtostr(h.lr) << '\n';
    }
}

void write_results_csv(const fs::path& path, const std::vector<ResultRow>& rows) {
    std::ofstream out = open_out(path);
    out << "category,set,model,rmse_ah,rmspe_pct\n";
    for (const auto& r : rows) {
        out << r.category << ',' << r.set_name << ',' << r.model << ',' << dtostr(r.rmse_ah)
            << ',' << dtostr(r.rmspe_pct) << '\n';
    }
}

void write_trajectories_csv(const fs::path& path,
                            const std::vector<CellTrajectory>& trajectories) {
    std::ofstream out = open_out(path);
    out << "cell_id,day,true_soh,est_soh\n";
    for (const auto& t : trajectories) {
        for (std::size_t i = 0; i < t.days.size(); ++i) {
            out << t.cell_id << ',' << t.days[i] << ',' << dtostr(t.true_soh[i]) << ','
                << dtostr(t.est_soh[i]) << '\n';
        }
    }
}

void write_features_csv(const fs::path& path, const std::vector<FeatureRow>& rows) {
    std::ofstream out = open_out(path);
    out << "cell_id,day,soc,band,area_ohm,peak_tau_s,peak_height\n";
    for (const auto& r : rows) {
        out << r.cell_id << ',' << r.day << ',' << r.soc_pct << ',' << band_name(r.band) << ','
            << dtostr(r.area_ohm) << ',' << dtostr(r.peak_tau_s) << ',' << dtostr(r.peak_height)
            << '\n';
    }
}

} // namespace drtsoh::io
