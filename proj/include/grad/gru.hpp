// Stacked GRU classifier built from scratch: two recurrent layers and a
// softmax head, trained by backpropagation through time with Adam. Used
// twice in the pipeline — as the normal/anomaly detector and as the
// noise/jump bias classifier over detected steps.
//
// Gate equations (z gates retention of the old state):
//   r = sigmoid(W_r [h_prev, x] + b_r)
//   z = sigmoid(W_z [h_prev, x] + b_z)
//   hcand = tanh(W_h [r*h_prev, x] + b_h)
//   h = z*h_prev + (1 - z)*hcand
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "grad/features.hpp"
#include "grad/inject.hpp"
#include "grad/linalg.hpp"
#include "grad/metrics.hpp"
#include "grad/rng.hpp"
#include "grad/util.hpp"

namespace grad {

struct GruLayerWeights {
    std::size_t hidden = 0, input = 0;
    Mat w_r, w_z, w_h;  // hidden x (hidden + input), input block after the state block
    Vec b_r, b_z, b_h;

    GruLayerWeights() = default;
    GruLayerWeights(std::size_t hidden_units, std::size_t input_dim)
        : hidden(hidden_units),
          input(input_dim),
          w_r(hidden_units, hidden_units + input_dim),
          w_z(hidden_units, hidden_units + input_dim),
          w_h(hidden_units, hidden_units + input_dim),
          b_r(hidden_units, 0.0),
          b_z(hidden_units, 0.0),
          b_h(hidden_units, 0.0) {}

    void init_glorot(Rng& rng) {
        const double limit = std::sqrt(6.0 / static_cast<double>(hidden + hidden + input));
        for (Mat* m : {&w_r, &w_z, &w_h})
            for (std::size_t i = 0; i < m->size(); ++i)
                m->data()[i] = rng.uniform(-limit, limit);
    }

    bool operator==(const GruLayerWeights&) const = default;
};

/// Per-step forward activations cached for the backward pass.
struct GruCellCache {
    Vec comb;    // [h_prev | x]
    Vec comb_h;  // [r*h_prev | x]
    Vec r, z, hcand, h_prev;
};

inline void gru_cell(const GruLayerWeights& w, std::span<const double> x,
                     std::span<const double> h_prev, std::span<double> h_out,
                     GruCellCache* cache = nullptr) {
    const std::size_t H = w.hidden, I = w.input;
    if (x.size() != I || h_prev.size() != H || h_out.size() != H)
        throw DataError("gru_cell: dimension mismatch");

    thread_local Vec comb, comb_h, r, z, hcand;
    comb.resize(H + I);
    comb_h.resize(H + I);
    r.resize(H);
    z.resize(H);
    hcand.resize(H);

    for (std::size_t i = 0; i < H; ++i) comb[i] = h_prev[i];
    for (std::size_t i = 0; i < I; ++i) comb[H + i] = x[i];

    matvec(w.w_r, comb, r);
    matvec(w.w_z, comb, z);
    for (std::size_t i = 0; i < H; ++i) {
        r[i] = sigmoid(r[i] + w.b_r[i]);
        z[i] = sigmoid(z[i] + w.b_z[i]);
    }

    for (std::size_t i = 0; i < H; ++i) comb_h[i] = r[i] * h_prev[i];
    for (std::size_t i = 0; i < I; ++i) comb_h[H + i] = x[i];
    matvec(w.w_h, comb_h, hcand);
    for (std::size_t i = 0; i < H; ++i) hcand[i] = std::tanh(hcand[i] + w.b_h[i]);

    for (std::size_t i = 0; i < H; ++i) h_out[i] = z[i] * h_prev[i] + (1.0 - z[i]) * hcand[i];

    if (cache) {
        cache->comb = comb;
        cache->comb_h = comb_h;
        cache->r = r;
        cache->z = z;
        cache->hcand = hcand;
        cache->h_prev.assign(h_prev.begin(), h_prev.end());
    }
}

struct GruLayerGrads {
    Mat w_r, w_z, w_h;
    Vec b_r, b_z, b_h;

    explicit GruLayerGrads(const GruLayerWeights& w = {})
        : w_r(w.hidden, w.hidden + w.input),
          w_z(w.hidden, w.hidden + w.input),
          w_h(w.hidden, w.hidden + w.input),
          b_r(w.hidden, 0.0),
          b_z(w.hidden, 0.0),
          b_h(w.hidden, 0.0) {}

    void zero() {
        w_r.fill(0.0);
        w_z.fill(0.0);
        w_h.fill(0.0);
        std::fill(b_r.begin(), b_r.end(), 0.0);
        std::fill(b_z.begin(), b_z.end(), 0.0);
        std::fill(b_h.begin(), b_h.end(), 0.0);
    }
};

/// Backward through one cell. `dh` is the loss gradient w.r.t. h_t;
/// produces the gradient w.r.t. h_{t-1} and (optionally) the input.
inline void gru_cell_backward(const GruLayerWeights& w, const GruCellCache& c,
                              std::span<const double> dh, GruLayerGrads& g,
                              std::span<double> dh_prev_out, std::span<double> dx_out) {
    const std::size_t H = w.hidden, I = w.input;
    thread_local Vec da, d_comb;
    da.resize(H);
    d_comb.resize(H + I);
    std::fill(dh_prev_out.begin(), dh_prev_out.end(), 0.0);
    if (!dx_out.empty()) std::fill(dx_out.begin(), dx_out.end(), 0.0);

    thread_local Vec dr;
    dr.resize(H);

    // h = z*h_prev + (1-z)*hcand
    for (std::size_t i = 0; i < H; ++i) dh_prev_out[i] += dh[i] * c.z[i];

    // Candidate branch.
    for (std::size_t i = 0; i < H; ++i) {
        const double dhcand = dh[i] * (1.0 - c.z[i]);
        da[i] = dhcand * (1.0 - c.hcand[i] * c.hcand[i]);
    }
    ger_add(g.w_h, da, c.comb_h);
    axpy(1.0, da, g.b_h);
    std::fill(d_comb.begin(), d_comb.end(), 0.0);
    matvec_t_add(w.w_h, da, d_comb);
    for (std::size_t i = 0; i < H; ++i) {
        dr[i] = d_comb[i] * c.h_prev[i];
        dh_prev_out[i] += d_comb[i] * c.r[i];
    }
    if (!dx_out.empty())
        for (std::size_t i = 0; i < I; ++i) dx_out[i] += d_comb[H + i];

    // Update gate.
    for (std::size_t i = 0; i < H; ++i) {
        const double dz = dh[i] * (c.h_prev[i] - c.hcand[i]);
        da[i] = dz * c.z[i] * (1.0 - c.z[i]);
    }
    ger_add(g.w_z, da, c.comb);
    axpy(1.0, da, g.b_z);
    std::fill(d_comb.begin(), d_comb.end(), 0.0);
    matvec_t_add(w.w_z, da, d_comb);
    for (std::size_t i = 0; i < H; ++i) dh_prev_out[i] += d_comb[i];
    if (!dx_out.empty())
        for (std::size_t i = 0; i < I; ++i) dx_out[i] += d_comb[H + i];

    // Reset gate.
    for (std::size_t i = 0; i < H; ++i) da[i] = dr[i] * c.r[i] * (1.0 - c.r[i]);
    ger_add(g.w_r, da, c.comb);
    axpy(1.0, da, g.b_r);
    std::fill(d_comb.begin(), d_comb.end(), 0.0);
    matvec_t_add(w.w_r, da, d_comb);
    for (std::size_t i = 0; i < H; ++i) dh_prev_out[i] += d_comb[i];
    if (!dx_out.empty())
        for (std::size_t i = 0; i < I; ++i) dx_out[i] += d_comb[H + i];
}

struct TrainMeta {
    std::uint64_t seed = 0;
    double learning_rate = 0.0;
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0;
    std::vector<double> train_loss, val_loss, val_f1_anomaly, val_f1_normal;
    Vec class_weights;
};

struct GruModel {
    std::size_t input_dim = FeatureFrame::kCount;
    std::size_t window = 10;
    std::size_t classes = 2;
    GruLayerWeights layer1;  // 32 units by default
    GruLayerWeights layer2;  // 16 units by default
    Mat head;                // classes x hidden2
    Vec head_bias;
    FeatureScaler scaler;
    std::uint64_t schema_hash = 0;
    TrainMeta meta;

    void validate() const {
        if (layer1.input != input_dim || layer2.input != layer1.hidden ||
            head.rows() != classes || head.cols() != layer2.hidden ||
            head_bias.size() != classes)
            throw DataError("GruModel: inconsistent dimensions");
    }
};

inline std::uint64_t feature_schema_hash() {
    Fnv1a64 h;
    for (const char* name : FeatureFrame::kNames) {
        h.update(name);
        h.update(",");
    }
    return h.digest();
}

inline GruModel make_gru_model(std::size_t input_dim, std::size_t window, std::size_t hidden1,
                               std::size_t hidden2, std::size_t classes, Rng& rng) {
    GruModel m;
    m.input_dim = input_dim;
    m.window = window;
    m.classes = classes;
    m.layer1 = GruLayerWeights(hidden1, input_dim);
    m.layer2 = GruLayerWeights(hidden2, hidden1);
    m.head = Mat(classes, hidden2);
    m.head_bias.assign(classes, 0.0);
    m.layer1.init_glorot(rng);
    m.layer2.init_glorot(rng);
    const double limit = std::sqrt(6.0 / static_cast<double>(hidden2 + classes));
    for (std::size_t i = 0; i < m.head.size(); ++i) m.head.data()[i] = rng.uniform(-limit, limit);
    m.schema_hash = feature_schema_hash();
    return m;
}

/// Cached activations for one window (both layers), reused across samples.
struct BpttCache {
    std::vector<GruCellCache> layer1, layer2;
    std::vector<Vec> h1;  // layer-1 outputs per step (layer-2 inputs)
    Vec h2_last;
};

/// Forward over rows [start, start + model.window) of a flat input matrix.
/// Returns class probabilities from the final step's hidden state.
inline Vec forward_window(const GruModel& m, const Mat& inputs, std::size_t start,
                          BpttCache* cache = nullptr) {
    if (inputs.cols() != m.input_dim) throw DataError("forward_window: feature dim mismatch");
    if (start + m.window > inputs.rows()) throw DataError("forward_window: window out of range");

    thread_local Vec h1, h2, h1_next, h2_next;
    h1.assign(m.layer1.hidden, 0.0);
    h2.assign(m.layer2.hidden, 0.0);
    h1_next.resize(m.layer1.hidden);
    h2_next.resize(m.layer2.hidden);
    if (cache) {
        cache->layer1.resize(m.window);
        cache->layer2.resize(m.window);
        cache->h1.resize(m.window);
    }

    for (std::size_t t = 0; t < m.window; ++t) {
        gru_cell(m.layer1, inputs.row(start + t), h1, h1_next,
                 cache ? &cache->layer1[t] : nullptr);
        std::swap(h1, h1_next);
        gru_cell(m.layer2, h1, h2, h2_next, cache ? &cache->layer2[t] : nullptr);
        std::swap(h2, h2_next);
        if (cache) cache->h1[t] = h1;
    }

    thread_local Vec logits;
    logits.resize(m.classes);
    matvec(m.head, h2, logits);
    for (std::size_t c = 0; c < m.classes; ++c) logits[c] += m.head_bias[c];
    if (cache) cache->h2_last = h2;
    return softmax(logits);
}

/// Convenience forward over an explicit window of frames.
inline Vec forward(const GruModel& m, std::span<const FeatureFrame> frames) {
    if (frames.size() != m.window) throw DataError("forward: wrong window length");
    Mat inputs(frames.size(), m.input_dim);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto v = m.scaler.fitted ? m.scaler.apply(frames[i]) : frames[i].values();
        for (std::size_t k = 0; k < m.input_dim; ++k) inputs(i, k) = v[k];
    }
    return forward_window(m, inputs, 0);
}

struct GruGrads {
    GruLayerGrads layer1, layer2;
    Mat head;
    Vec head_bias;

    explicit GruGrads(const GruModel& m)
        : layer1(m.layer1),
          layer2(m.layer2),
          head(m.classes, m.layer2.hidden),
          head_bias(m.classes, 0.0) {}

    void zero() {
        layer1.zero();
        layer2.zero();
        head.fill(0.0);
        std::fill(head_bias.begin(), head_bias.end(), 0.0);
    }
};

namespace detail {

template <typename Model, typename F>
void visit_tensors(Model& m, F&& f) {
    f(m.layer1.w_r.data(), m.layer1.w_r.size());
    f(m.layer1.w_z.data(), m.layer1.w_z.size());
    f(m.layer1.w_h.data(), m.layer1.w_h.size());
    f(m.layer1.b_r.data(), m.layer1.b_r.size());
    f(m.layer1.b_z.data(), m.layer1.b_z.size());
    f(m.layer1.b_h.data(), m.layer1.b_h.size());
    f(m.layer2.w_r.data(), m.layer2.w_r.size());
    f(m.layer2.w_z.data(), m.layer2.w_z.size());
    f(m.layer2.w_h.data(), m.layer2.w_h.size());
    f(m.layer2.b_r.data(), m.layer2.b_r.size());
    f(m.layer2.b_z.data(), m.layer2.b_z.size());
    f(m.layer2.b_h.data(), m.layer2.b_h.size());
    f(m.head.data(), m.head.size());
    f(m.head_bias.data(), m.head_bias.size());
}

}  // namespace detail

/// Windowed samples over one or more feature sequences. `end` is the index
/// of the window's final row; the label belongs to that step.
struct SequenceDataset {
    std::vector<Mat> sequences;
    struct Sample {
        std::size_t seq = 0;
        std::size_t end = 0;
        int label = 0;
    };
    std::vector<Sample> samples;

    std::size_t input_dim() const { return sequences.empty() ? 0 : sequences[0].cols(); }
};

/// Class-weighted cross-entropy over a batch plus full BPTT gradients.
/// Loss and gradients are averaged over the batch.
inline double loss_and_grads(const GruModel& m, const SequenceDataset& data,
                             std::span<const std::size_t> batch, std::span<const double> weights,
                             GruGrads& grads) {
    if (batch.empty()) throw DataError("loss_and_grads: empty batch");
    grads.zero();
    thread_local BpttCache cache;
    thread_local Vec dh2, dh2_prev, dh1, dh1_prev, dlogits;
    thread_local std::vector<Vec> dh1_add;

    double loss_sum = 0.0;
    for (std::size_t bi : batch) {
        const auto& s = data.samples[bi];
        if (s.label < 0 || static_cast<std::size_t>(s.label) >= m.classes)
            throw DataError("loss_and_grads: label out of range");
        const std::size_t start = s.end + 1 - m.window;
        const Vec probs = forward_window(m, data.sequences[s.seq], start, &cache);
        const double wgt = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(s.label)];
        loss_sum += wgt * -std::log(std::max(probs[static_cast<std::size_t>(s.label)], 1e-300));

        // Head.
        dlogits.resize(m.classes);
        for (std::size_t c = 0; c < m.classes; ++c)
            dlogits[c] = wgt * (probs[c] - (static_cast<int>(c) == s.label ? 1.0 : 0.0));
        ger_add(grads.head, dlogits, cache.h2_last);
        axpy(1.0, dlogits, grads.head_bias);

        dh2.assign(m.layer2.hidden, 0.0);
        matvec_t_add(m.head, dlogits, dh2);

        // Layer 2 backward, collecting input gradients per step.
        dh1_add.resize(m.window);
        dh2_prev.resize(m.layer2.hidden);
        for (std::size_t t = m.window; t-- > 0;) {
            dh1_add[t].resize(m.layer1.hidden);
            gru_cell_backward(m.layer2, cache.layer2[t], dh2, grads.layer2, dh2_prev, dh1_add[t]);
            std::swap(dh2, dh2_prev);
        }

        // Layer 1 backward.
        dh1.assign(m.layer1.hidden, 0.0);
        dh1_prev.resize(m.layer1.hidden);
        for (std::size_t t = m.window; t-- > 0;) {
            axpy(1.0, dh1_add[t], dh1);
            gru_cell_backward(m.layer1, cache.layer1[t], dh1, grads.layer1, dh1_prev, {});
            std::swap(dh1, dh1_prev);
        }
    }

    const double inv = 1.0 / static_cast<double>(batch.size());
    detail::visit_tensors(grads, [&](double* p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) p[i] *= inv;
    });
    return loss_sum * inv;
}

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t epochs = 50;
    std::size_t batch_size = 64;
    bool class_weighting = true;
    double clip_norm = 5.0;
    std::uint64_t seed = 42;
    std::size_t patience = 5;
    std::size_t hidden1 = 32;
    std::size_t hidden2 = 16;
    std::size_t window = 10;
    std::size_t classes = 2;

    void validate() const {
        if (!(learning_rate > 0.0) || epochs < 1 || batch_size < 1 || window < 1)
            throw DataError("invalid training configuration");
    }
};

namespace detail {

struct AdamState {
    GruGrads m, v;
    std::size_t t = 0;
    explicit AdamState(const GruModel& model) : m(model), v(model) {}
};

inline void adam_step(GruModel& model, const GruGrads& grads, AdamState& adam, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++adam.t;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(adam.t));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(adam.t));

    // Walk all four structures in the same tensor order.
    std::vector<std::pair<double*, std::size_t>> tp, tg, tm, tv;
    visit_tensors(model, [&](double* p, std::size_t n) { tp.emplace_back(p, n); });
    visit_tensors(const_cast<GruGrads&>(grads), [&](double* p, std::size_t n) { tg.emplace_back(p, n); });
    visit_tensors(adam.m, [&](double* p, std::size_t n) { tm.emplace_back(p, n); });
    visit_tensors(adam.v, [&](double* p, std::size_t n) { tv.emplace_back(p, n); });
    for (std::size_t k = 0; k < tp.size(); ++k) {
        double* p = tp[k].first;
        const double* g = tg[k].first;
        double* mm = tm[k].first;
        double* vv = tv[k].first;
        for (std::size_t i = 0; i < tp[k].second; ++i) {
            mm[i] = b1 * mm[i] + (1.0 - b1) * g[i];
            vv[i] = b2 * vv[i] + (1.0 - b2) * g[i] * g[i];
            p[i] -= lr * (mm[i] / bc1) / (std::sqrt(vv[i] / bc2) + eps);
        }
    }
}

inline void clip_gradients(GruGrads& grads, double clip_norm) {
    double sq = 0.0;
    visit_tensors(grads, [&](double* p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) sq += p[i] * p[i];
    });
    const double norm = std::sqrt(sq);
    if (norm > clip_norm && norm > 0.0) {
        const double scale = clip_norm / norm;
        visit_tensors(grads, [&](double* p, std::size_t n) {
            for (std::size_t i = 0; i < n; ++i) p[i] *= scale;
        });
    }
}

inline double evaluate_loss(const GruModel& m, const SequenceDataset& data,
                            std::span<const double> weights, DetectionScore* score_out) {
    double loss = 0.0;
    std::vector<char> pred, truth;
    for (const auto& s : data.samples) {
        const Vec probs = forward_window(m, data.sequences[s.seq], s.end + 1 - m.window);
        const double wgt = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(s.label)];
        loss += wgt * -std::log(std::max(probs[static_cast<std::size_t>(s.label)], 1e-300));
        if (score_out) {
            std::size_t arg = 0;
            for (std::size_t c = 1; c < probs.size(); ++c)
                if (probs[c] > probs[arg]) arg = c;
            pred.push_back(arg == 1 ? 1 : 0);
            truth.push_back(s.label == 1 ? 1 : 0);
        }
    }
    if (score_out) *score_out = score_detection(pred, truth);
    return loss / static_cast<double>(data.samples.size());
}

}  // namespace detail

inline Vec inverse_frequency_weights(const SequenceDataset& data, std::size_t classes) {
    std::vector<std::size_t> counts(classes, 0);
    for (const auto& s : data.samples) ++counts[static_cast<std::size_t>(s.label)];
    Vec w(classes, 1.0);
    for (std::size_t c = 0; c < classes; ++c) {
        if (counts[c] == 0) throw DataError("training data does not contain every class");
        w[c] = static_cast<double>(data.samples.size()) /
               (static_cast<double>(classes) * static_cast<double>(counts[c]));
    }
    return w;
}

/// Train a fresh model. Deterministic for a fixed config: seeded init,
/// seeded shuffles, sequential batch accumulation. Keeps the weights from
/// the best validation-loss epoch.
inline GruModel train_gru(const SequenceDataset& train_set, const SequenceDataset& val_set,
                          const TrainConfig& cfg) {
    cfg.validate();
    if (train_set.samples.empty() || val_set.samples.empty())
        throw DataError("train_gru: empty dataset");

    Rng rng(cfg.seed);
    GruModel model =
        make_gru_model(train_set.input_dim(), cfg.window, cfg.hidden1, cfg.hidden2, cfg.classes, rng);
    model.meta.seed = cfg.seed;
    model.meta.learning_rate = cfg.learning_rate;

    const Vec weights = cfg.class_weighting ? inverse_frequency_weights(train_set, cfg.classes)
                                            : Vec(cfg.classes, 1.0);
    model.meta.class_weights = weights;

    detail::AdamState adam(model);
    GruGrads grads(model);

    std::vector<std::size_t> order(train_set.samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    GruModel best = model;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double train_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
            const std::size_t len = std::min(cfg.batch_size, order.size() - b);
            const std::span<const std::size_t> batch(order.data() + b, len);
            const double loss = loss_and_grads(model, train_set, batch, weights, grads);
            detail::clip_gradients(grads, cfg.clip_norm);
            detail::adam_step(model, grads, adam, cfg.learning_rate);
            train_loss += loss * static_cast<double>(len);
            seen += len;
        }
        train_loss /= static_cast<double>(seen);

        DetectionScore val_score;
        const double val_loss = detail::evaluate_loss(model, val_set, weights,
                                                      cfg.classes == 2 ? &val_score : nullptr);
        model.meta.train_loss.push_back(train_loss);
        model.meta.val_loss.push_back(val_loss);
        if (cfg.classes == 2) {
            model.meta.val_f1_anomaly.push_back(val_score.anomaly.f1);
            model.meta.val_f1_normal.push_back(val_score.normal.f1);
        }
        model.meta.epochs_run = epoch + 1;

        if (val_loss < best_val) {
            best_val = val_loss;
            best = model;
            best.meta.best_epoch = epoch + 1;
            since_best = 0;
        } else if (++since_best > cfg.patience) {
            break;
        }
    }

    best.meta.train_loss = model.meta.train_loss;
    best.meta.val_loss = model.meta.val_loss;
    best.meta.val_f1_anomaly = model.meta.val_f1_anomaly;
    best.meta.val_f1_normal = model.meta.val_f1_normal;
    best.meta.epochs_run = model.meta.epochs_run;
    return best;
}

// ---------------------------------------------------------------------------
// Streaming prediction
// ---------------------------------------------------------------------------

struct StepPrediction {
    bool detect = false;
    BiasType bias = BiasType::none;
    std::array<double, 2> probs = {1.0, 0.0};
};

inline Mat scale_frames(const FeatureScaler& scaler, std::span<const FeatureFrame> frames) {
    Mat out(frames.size(), FeatureFrame::kCount);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto v = scaler.fitted ? scaler.apply(frames[i]) : frames[i].values();
        for (std::size_t k = 0; k < FeatureFrame::kCount; ++k) out(i, k) = v[k];
    }
    return out;
}

/// Slide the detector over the frames; run the bias classifier only on
/// flagged steps. Steps before the first full window stay normal.
inline std::vector<StepPrediction> predict_stream(const GruModel& detector,
                                                  const GruModel* bias_clf,
                                                  std::span<const FeatureFrame> frames) {
    detector.validate();
    if (bias_clf) {
        bias_clf->validate();
        if (bias_clf->window != detector.window || bias_clf->input_dim != detector.input_dim ||
            bias_clf->schema_hash != detector.schema_hash)
            throw DataError("predict_stream: detector and classifier schema mismatch");
    }

    std::vector<StepPrediction> out(frames.size());
    if (frames.size() < detector.window) return out;

    const Mat det_inputs = scale_frames(detector.scaler, frames);
    Mat clf_inputs;
    if (bias_clf) clf_inputs = scale_frames(bias_clf->scaler, frames);

    for (std::size_t i = detector.window - 1; i < frames.size(); ++i) {
        const std::size_t start = i + 1 - detector.window;
        const Vec probs = forward_window(detector, det_inputs, start);
        StepPrediction p;
        p.probs = {probs[0], probs[1]};
        p.detect = probs[1] > probs[0];
        if (p.detect && bias_clf) {
            const Vec bp = forward_window(*bias_clf, clf_inputs, start);
            p.bias = bp[1] > bp[0] ? BiasType::jump : BiasType::noise;
        }
        out[i] = p;
    }
    return out;
}

inline void write_training_log(const std::string& path, const TrainMeta& meta) {
    CsvWriter w(path);
    w.row({"epoch", "train_loss", "val_loss", "val_f1_anomaly", "val_f1_normal"});
    for (std::size_t e = 0; e < meta.train_loss.size(); ++e) {
        w.row({std::to_string(e + 1), format_double(meta.train_loss[e]),
               format_double(meta.val_loss[e]),
               e < meta.val_f1_anomaly.size() ? format_double(meta.val_f1_anomaly[e]) : "",
               e < meta.val_f1_normal.size() ? format_double(meta.val_f1_normal[e]) : ""});
    }
}

}  // namespace grad
