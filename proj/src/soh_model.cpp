#include "drtsoh/soh_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "drtsoh/errors.hpp"
#include "drtsoh/parallel.hpp"
#include "drtsoh/rng.hpp"

namespace drtsoh {

void ModelConfig::validate() const {
    if (input_dim < 1) throw ArgumentError("model config: input_dim must be >= 1");
    for (const std::size_t h : lstm_hidden) {
        if (h < 1) throw ArgumentError("model config: lstm hidden sizes must be >= 1");
    }
    for (const std::size_t d : fc_dims) {
        if (d < 1) throw ArgumentError("model config: fc dims must be >= 1");
    }
    if (fc_dims.back() != 1) throw ArgumentError("model config: final fc dim must be 1");
}

namespace {

double selu_eval(double x, double scale, double alpha) {
    return x > 0.0 ? scale * x : scale * alpha * (std::exp(x) - 1.0);
}

double selu_grad_eval(double x, double scale, double alpha) {
    return x > 0.0 ? scale : scale * alpha * std::exp(x);
}

} // namespace

double selu(double x) {
    const ModelConfig defaults;
    return selu_eval(x, defaults.selu_scale, defaults.selu_alpha);
}

double selu_grad(double x) {
    const ModelConfig defaults;
    return selu_grad_eval(x, defaults.selu_scale, defaults.selu_alpha);
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::size_t lstm_input_dim(const ModelConfig& c, std::size_t layer) {
    return layer == 0 ? c.input_dim : c.lstm_hidden[layer - 1];
}

std::size_t fc_input_dim(const ModelConfig& c, std::size_t layer) {
    return layer == 0 ? c.lstm_hidden.back() : c.fc_dims[layer - 1];
}

} // namespace

SohModelParams SohModelParams::zeros(const ModelConfig& config) {
    config.validate();
    SohModelParams p;
    p.config = config;
    for (std::size_t l = 0; l < config.lstm_hidden.size(); ++l) {
        const std::size_t h = config.lstm_hidden[l];
        const std::size_t d = lstm_input_dim(config, l);
        p.lstm.push_back({linalg::Matrix(4 * h, d), linalg::Matrix(4 * h, h), linalg::Vector(4 * h, 0.0)});
    }
    for (std::size_t l = 0; l < config.fc_dims.size(); ++l) {
        const std::size_t out = config.fc_dims[l];
        const std::size_t in = fc_input_dim(config, l);
        p.fc.push_back({linalg::Matrix(out, in), linalg::Vector(out, 0.0)});
    }
    return p;
}

SohModelParams SohModelParams::init_random(const ModelConfig& config, std::uint64_t seed) {
    SohModelParams p = zeros(config);
    Rng rng(Rng::mix(seed, 0x1217));
    for (std::size_t l = 0; l < p.lstm.size(); ++l) {
        // fan_in of each gate unit: layer input plus recurrent state
        const double bound = 1.0 / std::sqrt(static_cast<double>(lstm_input_dim(config, l) +
                                                                 config.lstm_hidden[l]));
        for (double& v : p.lstm[l].w_input.data()) v = rng.uniform(-bound, bound);
        for (double& v : p.lstm[l].w_recur.data()) v = rng.uniform(-bound, bound);
        for (double& v : p.lstm[l].bias) v = rng.uniform(-bound, bound);
    }
    for (std::size_t l = 0; l < p.fc.size(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fc_input_dim(config, l)));
        for (double& v : p.fc[l].w.data()) v = rng.uniform(-bound, bound);
        for (double& v : p.fc[l].b) v = rng.uniform(-bound, bound);
    }
    return p;
}

std::size_t SohModelParams::param_count() const {
    std::size_t n = 0;
    for (const auto* t : tensor_list()) n += t->size();
    return n;
}

std::vector<std::vector<double>*> SohModelParams::tensor_list() {
    std::vector<std::vector<double>*> out;
    for (auto& l : lstm) {
        out.push_back(&l.w_input.data());
        out.push_back(&l.w_recur.data());
        out.push_back(&l.bias);
    }
    for (auto& l : fc) {
        out.push_back(&l.w.data());
        out.push_back(&l.b);
    }
    return out;
}

std::vector<const std::vector<double>*> SohModelParams::tensor_list() const {
    std::vector<const std::vector<double>*> out;
    for (const auto& l : lstm) {
        out.push_back(&l.w_input.data());
        out.push_back(&l.w_recur.data());
        out.push_back(&l.bias);
    }
    for (const auto& l : fc) {
        out.push_back(&l.w.data());
        out.push_back(&l.b);
    }
    return out;
}

std::vector<double> SohModelParams::flatten() const {
    std::vector<double> flat;
    flat.reserve(param_count());
    for (const auto* t : tensor_list()) flat.insert(flat.end(), t->begin(), t->end());
    return flat;
}

SohModelParams SohModelParams::from_flat(const ModelConfig& config, std::span<const double> flat) {
    SohModelParams p = zeros(config);
    std::size_t pos = 0;
    for (auto* t : p.tensor_list()) {
        if (pos + t->size() > flat.size()) throw ArgumentError("from_flat: parameter array too short");
        std::copy(flat.begin() + pos, flat.begin() + pos + t->size(), t->begin());
        pos += t->size();
    }
    if (pos != flat.size()) throw ArgumentError("from_flat: parameter array length mismatch");
    return p;
}

std::vector<double> forward(const SohModelParams& params, const std::vector<linalg::Vector>& inputs,
                            ForwardCache* cache) {
    const ModelConfig& cfg = params.config;
    const std::size_t T = inputs.size();
    if (T == 0) throw ArgumentError("forward: empty sequence");
    for (const auto& x : inputs) {
        if (x.size() != cfg.input_dim) throw ArgumentError("forward: input dimension mismatch");
    }
    const std::size_t n_lstm = params.lstm.size();

    if (cache) {
        auto sized = [&](auto& v) { v.assign(n_lstm, std::vector<linalg::Vector>(T)); };
        sized(cache->x);
        sized(cache->h_prev);
        sized(cache->c_prev);
        sized(cache->gate_i);
        sized(cache->gate_f);
        sized(cache->gate_g);
        sized(cache->gate_o);
        sized(cache->c);
        sized(cache->tanh_c);
        sized(cache->h);
        sized(cache->y);
        cache->fc_in.assign(params.fc.size(), std::vector<linalg::Vector>(T));
        cache->outputs.assign(T, 0.0);
    }

    std::vector<linalg::Vector> seq = inputs;
    for (std::size_t l = 0; l < n_lstm; ++l) {
        const LstmLayerParams& lp = params.lstm[l];
        const std::size_t h_dim = cfg.lstm_hidden[l];
        linalg::Vector h(h_dim, 0.0), c(h_dim, 0.0);
        std::vector<linalg::Vector> out(T);

        for (std::size_t t = 0; t < T; ++t) {
            const linalg::Vector& x = seq[t];
            linalg::Vector z = linalg::matvec_serial(lp.w_input, x);
            const linalg::Vector zr = linalg::matvec_serial(lp.w_recur, h);
            for (std::size_t k = 0; k < z.size(); ++k) z[k] += zr[k] + lp.bias[k];

            linalg::Vector gi(h_dim), gf(h_dim), gg(h_dim), go(h_dim);
            for (std::size_t k = 0; k < h_dim; ++k) {
                gi[k] = sigmoid(z[k]);
                gf[k] = sigmoid(z[h_dim + k]);
                gg[k] = std::tanh(z[2 * h_dim + k]);
                go[k] = sigmoid(z[3 * h_dim + k]);
            }
            linalg::Vector c_new(h_dim), tc(h_dim), h_new(h_dim), y(h_dim);
            for (std::size_t k = 0; k < h_dim; ++k) {
                c_new[k] = gf[k] * c[k] + gi[k] * gg[k];
                tc[k] = std::tanh(c_new[k]);
                h_new[k] = go[k] * tc[k];
                y[k] = selu_eval(h_new[k], cfg.selu_scale, cfg.selu_alpha);
            }

            if (cache) {
                cache->x[l][t] = x;
                cache->h_prev[l][t] = h;
                cache->c_prev[l][t] = c;
                cache->gate_i[l][t] = gi;
                cache->gate_f[l][t] = gf;
                cache->gate_g[l][t] = gg;
                cache->gate_o[l][t] = go;
                cache->c[l][t] = c_new;
                cache->tanh_c[l][t] = tc;
                cache->h[l][t] = h_new;
                cache->y[l][t] = y;
            }
            h = h_new;
            c = c_new;
            out[t] = std::move(y);
        }
        seq = std::move(out);
    }

    // FC stack per time step, all linear
    std::vector<double> outputs(T);
    for (std::size_t t = 0; t < T; ++t) {
        linalg::Vector a = seq[t];
        for (std::size_t l = 0; l < params.fc.size(); ++l) {
            if (cache) cache->fc_in[l][t] = a;
            linalg::Vector next = linalg::matvec_serial(params.fc[l].w, a);
            for (std::size_t k = 0; k < next.size(); ++k) next[k] += params.fc[l].b[k];
            a = std::move(next);
        }
        outputs[t] = a[0];
    }
    if (cache) cache->outputs = outputs;
    return outputs;
}

double mse(std::span<const double> outputs, std::span<const double> targets) {
    if (outputs.size() != targets.size() || outputs.empty()) {
        throw ArgumentError("mse: length mismatch or empty");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        const double d = outputs[i] - targets[i];
        s += d * d;
    }
    return s / static_cast<double>(outputs.size());
}

SohModelParams backward(const SohModelParams& params, const ForwardCache& cache,
                        std::span<const double> targets, double loss_scale) {
    const ModelConfig& cfg = params.config;
    const std::size_t T = cache.outputs.size();
    if (targets.size() != T) throw ArgumentError("backward: target length mismatch");
    const std::size_t n_lstm = params.lstm.size();
    const std::size_t n_fc = params.fc.size();

    SohModelParams grads = SohModelParams::zeros(cfg);

    // d loss / d output per step, loss = loss_scale * mean_t (out - target)^2
    std::vector<double> dout(T);
    for (std::size_t t = 0; t < T; ++t) {
        dout[t] = loss_scale * 2.0 * (cache.outputs[t] - targets[t]) / static_cast<double>(T);
    }

    // FC stack backward; collect the gradient w.r.t. the top LSTM output
    std::vector<linalg::Vector> dy_top(T);
    for (std::size_t t = 0; t < T; ++t) {
        linalg::Vector da(1, dout[t]);
        for (std::size_t l = n_fc; l-- > 0;) {
            const FcLayerParams& fp = params.fc[l];
            const linalg::Vector& in = cache.fc_in[l][t];
            for (std::size_t r = 0; r < fp.w.rows(); ++r) {
                grads.fc[l].b[r] += da[r];
                for (std::size_t ccol = 0; ccol < fp.w.cols(); ++ccol) {
                    grads.fc[l].w(r, ccol) += da[r] * in[ccol];
                }
            }
            linalg::Vector din(fp.w.cols(), 0.0);
            for (std::size_t r = 0; r < fp.w.rows(); ++r) {
                for (std::size_t ccol = 0; ccol < fp.w.cols(); ++ccol) {
                    din[ccol] += fp.w(r, ccol) * da[r];
                }
            }
            da = std::move(din);
        }
        dy_top[t] = std::move(da);
    }

    // LSTM layers, top down; dy holds d loss / d selu-output per step
    std::vector<linalg::Vector> dy = std::move(dy_top);
    for (std::size_t l = n_lstm; l-- > 0;) {
        const LstmLayerParams& lp = params.lstm[l];
        const std::size_t h_dim = cfg.lstm_hidden[l];
        const std::size_t in_dim = lstm_input_dim(cfg, l);

        std::vector<linalg::Vector> dx(T, linalg::Vector(in_dim, 0.0));
        linalg::Vector dh_next(h_dim, 0.0), dc_next(h_dim, 0.0);

        for (std::size_t t = T; t-- > 0;) {
            const auto& gi = cache.gate_i[l][t];
            const auto& gf = cache.gate_f[l][t];
            const auto& gg = cache.gate_g[l][t];
            const auto& go = cache.gate_o[l][t];
            const auto& tc = cache.tanh_c[l][t];
            const auto& h_raw = cache.h[l][t];
            const auto& c_prev = cache.c_prev[l][t];

            linalg::Vector dh(h_dim);
            for (std::size_t k = 0; k < h_dim; ++k) {
                dh[k] = dy[t][k] * selu_grad_eval(h_raw[k], cfg.selu_scale, cfg.selu_alpha) +
                        dh_next[k];
            }

            linalg::Vector dz(4 * h_dim);
            linalg::Vector dc(h_dim);
            for (std::size_t k = 0; k < h_dim; ++k) {
                const double do_ = dh[k] * tc[k];
                dc[k] = dh[k] * go[k] * (1.0 - tc[k] * tc[k]) + dc_next[k];
                const double di = dc[k] * gg[k];
                const double df = dc[k] * c_prev[k];
                const double dg = dc[k] * gi[k];
                dz[k] = di * gi[k] * (1.0 - gi[k]);
                dz[h_dim + k] = df * gf[k] * (1.0 - gf[k]);
                dz[2 * h_dim + k] = dg * (1.0 - gg[k] * gg[k]);
                dz[3 * h_dim + k] = do_ * go[k] * (1.0 - go[k]);
            }

            const auto& x = cache.x[l][t];
            const auto& h_prev = cache.h_prev[l][t];
            for (std::size_t r = 0; r < 4 * h_dim; ++r) {
                grads.lstm[l].bias[r] += dz[r];
                const double dzr = dz[r];
                auto wi_row = grads.lstm[l].w_input.row(r);
                for (std::size_t ccol = 0; ccol < in_dim; ++ccol) wi_row[ccol] += dzr * x[ccol];
                auto wr_row = grads.lstm[l].w_recur.row(r);
                for (std::size_t ccol = 0; ccol < h_dim; ++ccol) wr_row[ccol] += dzr * h_prev[ccol];
            }

            // propagate to x_t and to the previous step
            for (std::size_t r = 0; r < 4 * h_dim; ++r) {
                const double dzr = dz[r];
                if (dzr == 0.0) continue;
                auto wi_row = lp.w_input.row(r);
                for (std::size_t ccol = 0; ccol < in_dim; ++ccol) dx[t][ccol] += wi_row[ccol] * dzr;
            }
            linalg::Vector dh_prev(h_dim, 0.0);
            for (std::size_t r = 0; r < 4 * h_dim; ++r) {
                const double dzr = dz[r];
                if (dzr == 0.0) continue;
                auto wr_row = lp.w_recur.row(r);
                for (std::size_t ccol = 0; ccol < h_dim; ++ccol) dh_prev[ccol] += wr_row[ccol] * dzr;
            }
            linalg::Vector dc_prev(h_dim);
            for (std::size_t k = 0; k < h_dim; ++k) dc_prev[k] = dc[k] * gf[k];

            dh_next = std::move(dh_prev);
            dc_next = std::move(dc_prev);
        }
        dy = std::move(dx);
    }
    return grads;
}

AdamState AdamState::zeros(std::size_t param_count) {
    return {std::vector<double>(param_count, 0.0), std::vector<double>(param_count, 0.0), 0};
}

void adam_step(SohModelParams& params, const SohModelParams& grads, AdamState& state, double lr,
               double beta1, double beta2, double eps) {
    auto ptensors = params.tensor_list();
    auto gtensors = grads.tensor_list();
    if (ptensors.size() != gtensors.size()) throw ArgumentError("adam_step: shape mismatch");

    state.t += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));

    std::size_t idx = 0;
    for (std::size_t ti = 0; ti < ptensors.size(); ++ti) {
        auto& p = *ptensors[ti];
        const auto& g = *gtensors[ti];
        if (p.size() != g.size()) throw ArgumentError("adam_step: tensor size mismatch");
        for (std::size_t k = 0; k < p.size(); ++k, ++idx) {
            state.m[idx] = beta1 * state.m[idx] + (1.0 - beta1) * g[k];
            state.v[idx] = beta2 * state.v[idx] + (1.0 - beta2) * g[k] * g[k];
            const double mhat = state.m[idx] / bc1;
            const double vhat = state.v[idx] / bc2;
            p[k] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

void TrainConfig::validate() const {
    if (!(lr0 > 0.0)) throw ArgumentError("train config: lr0 must be positive");
    if (!(plateau_factor > 0.0 && plateau_factor < 1.0)) {
        throw ArgumentError("train config: plateau_factor must be in (0, 1)");
    }
    if (plateau_patience < 1) throw ArgumentError("train config: patience must be >= 1");
    if (max_epochs < 1) throw ArgumentError("train config: max_epochs must be >= 1");
    if (batch_size < 1) throw ArgumentError("train config: batch_size must be >= 1");
}

Normalizer Normalizer::fit(std::span<const SequenceSample> train) {
    if (train.empty()) throw ArgumentError("normalizer: empty training set");
    const std::size_t d = train.front().inputs.front().size();
    linalg::Vector mean(d, 0.0), var(d, 0.0);
    std::size_t count = 0;
    for (const auto& s : train) {
        for (const auto& x : s.inputs) {
            if (x.size() != d) throw ArgumentError("normalizer: inconsistent input dims");
            for (std::size_t k = 0; k < d; ++k) mean[k] += x[k];
            ++count;
        }
    }
    for (double& m : mean) m /= static_cast<double>(count);
    for (const auto& s : train) {
        for (const auto& x : s.inputs) {
            for (std::size_t k = 0; k < d; ++k) {
                const double dv = x[k] - mean[k];
                var[k] += dv * dv;
            }
        }
    }
    linalg::Vector stddev(d);
    for (std::size_t k = 0; k < d; ++k) {
        stddev[k] = std::max(std::sqrt(var[k] / static_cast<double>(count)), 1e-8);
    }
    return {std::move(mean), std::move(stddev)};
}

linalg::Vector Normalizer::apply(const linalg::Vector& x) const {
    if (x.size() != mean.size()) throw ArgumentError("normalizer: dimension mismatch");
    linalg::Vector out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        // clamp rare single-bin spikes from the nonnegative fits; they carry
        // no usable signal but destabilize the recurrent layers
        out[k] = std::clamp((x[k] - mean[k]) / stddev[k], -6.0, 6.0);
    }
    return out;
}

std::vector<double> predict(const SohModel& model, const SequenceSample& sample) {
    std::vector<linalg::Vector> normed(sample.inputs.size());
    for (std::size_t t = 0; t < sample.inputs.size(); ++t) normed[t] = model.norm.apply(sample.inputs[t]);
    return forward(model.params, normed);
}

namespace {

constexpr double kGradClipNorm = 5.0;

void add_params(SohModelParams& a, const SohModelParams& b) {
    auto at = a.tensor_list();
    auto bt = b.tensor_list();
    for (std::size_t i = 0; i < at.size(); ++i) {
        for (std::size_t k = 0; k < at[i]->size(); ++k) (*at[i])[k] += (*bt[i])[k];
    }
}

void scale_params(SohModelParams& a, double s) {
    for (auto* t : a.tensor_list()) {
        for (double& v : *t) v *= s;
    }
}

// fixed pairwise tree reduction: independent of thread count
SohModelParams tree_reduce(std::vector<SohModelParams>& grads) {
    std::size_t n = grads.size();
    while (n > 1) {
        const std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) add_params(grads[i * 2], grads[i * 2 + 1]);
        std::size_t w = 0;
        for (std::size_t i = 0; i < n; i += 2, ++w) {
            if (w != i) grads[w] = std::move(grads[i]);
        }
        n = w;
    }
    return std::move(grads[0]);
}

} // namespace

TrainResult train(const ModelConfig& config, const std::vector<SequenceSample>& train_set,
                  const std::vector<SequenceSample>& val_set, const TrainConfig& tc) {
    config.validate();
    tc.validate();
    if (train_set.empty() || val_set.empty()) {
        throw ArgumentError("train: empty train or validation split");
    }
    {
        std::set<std::string> train_ids;
        for (const auto& s : train_set) train_ids.insert(s.cell_id);
        for (const auto& s : val_set) {
            if (train_ids.count(s.cell_id)) {
                throw ArgumentError("train: train/val splits must be disjoint");
            }
        }
    }

    const Normalizer norm = Normalizer::fit(train_set);
    auto normalize = [&](const SequenceSample& s) {
        std::vector<linalg::Vector> out(s.inputs.size());
        for (std::size_t t = 0; t < s.inputs.size(); ++t) out[t] = norm.apply(s.inputs[t]);
        return out;
    };
    std::vector<std::vector<linalg::Vector>> train_inputs(train_set.size());
    std::vector<std::vector<linalg::Vector>> val_inputs(val_set.size());
    for (std::size_t i = 0; i < train_set.size(); ++i) train_inputs[i] = normalize(train_set[i]);
    for (std::size_t i = 0; i < val_set.size(); ++i) val_inputs[i] = normalize(val_set[i]);

    SohModelParams params = SohModelParams::init_random(config, Rng::mix(tc.seed, 0xA11));
    AdamState adam = AdamState::zeros(params.param_count());
    double lr = tc.lr0;
    double best_val = std::numeric_limits<double>::infinity();
    double best_val_exact = std::numeric_limits<double>::infinity();
    int bad_epochs = 0;
    std::vector<double> best_params;

    std::vector<EpochStats> history;
    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 1; epoch <= tc.max_epochs; ++epoch) {
        Rng shuffle_rng(Rng::mix(tc.seed, 0xE80C + static_cast<std::uint64_t>(epoch)));
        shuffle(order, shuffle_rng);

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
            const std::size_t bsz = std::min(tc.batch_size, order.size() - start);
            std::vector<SohModelParams> grads(bsz);
            std::vector<double> losses(bsz);
            par::parallel_for(bsz, [&](std::size_t bi) {
                const std::size_t si = order[start + bi];
                ForwardCache cache;
                const std::vector<double> out = forward(params, train_inputs[si], &cache);
                losses[bi] = mse(out, train_set[si].targets);
                grads[bi] = backward(params, cache, train_set[si].targets);
            });
            for (const double l : losses) loss_sum += l;
            SohModelParams total = tree_reduce(grads);
            scale_params(total, 1.0 / static_cast<double>(bsz));
            // global-norm gradient clipping keeps the recurrent updates stable
            double norm2 = 0.0;
            for (const auto* t : total.tensor_list()) {
                for (const double v : *t) norm2 += v * v;
            }
            if (norm2 > kGradClipNorm * kGradClipNorm) {
                scale_params(total, kGradClipNorm / std::sqrt(norm2));
            }
            adam_step(params, total, adam, lr, tc.adam_beta1, tc.adam_beta2, tc.adam_eps);
        }
        const double train_mse = loss_sum / static_cast<double>(train_set.size());

        double val_sum = 0.0;
        for (std::size_t i = 0; i < val_set.size(); ++i) {
            const std::vector<double> out = forward(params, val_inputs[i]);
            val_sum += mse(out, val_set[i].targets);
        }
        const double val_mse = val_sum / static_cast<double>(val_set.size());

        history.push_back({epoch, train_mse, val_mse, lr});

        if (tc.restore_best_val && val_mse < best_val_exact) {
            best_val_exact = val_mse;
            best_params = params.flatten();
        }
        if (val_mse < best_val - tc.plateau_min_delta) {
            best_val = val_mse;
            bad_epochs = 0;
        } else if (++bad_epochs >= tc.plateau_patience) {
            if (lr * tc.plateau_factor >= tc.min_lr) lr *= tc.plateau_factor;
            bad_epochs = 0;
        }
    }
    if (tc.restore_best_val) params = SohModelParams::from_flat(config, best_params);
    return {{std::move(params), norm}, std::move(history)};
}

double rmse(std::span<const double> y, std::span<const double> y_hat) {
    if (y.size() != y_hat.size() || y.empty()) throw ArgumentError("rmse: length mismatch or empty");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - y_hat[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(y.size()));
}

double rmspe_pct(std::span<const double> y, std::span<const double> y_hat) {
    if (y.size() != y_hat.size() || y.empty()) {
        throw ArgumentError("rmspe: length mismatch or empty");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 0.0) throw ArgumentError("rmspe: zero target");
        const double r = (y[i] - y_hat[i]) / y[i];
        s += r * r;
    }
    return std::sqrt(s / static_cast<double>(y.size())) * 100.0;
}

} // namespace drtsoh
