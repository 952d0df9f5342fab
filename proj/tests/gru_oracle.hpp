// Scalar-loop forward pass for the stacked GRU, written with explicit
// index arithmetic and no shared kernels — the reference path for cell and
// forward checks.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "grad/gru.hpp"

namespace oracle {

inline std::vector<double> gru_cell_scalar(const grad::GruLayerWeights& w,
                                           const std::vector<double>& x,
                                           const std::vector<double>& h_prev) {
    const std::size_t H = w.hidden, I = w.input;
    std::vector<double> r(H), z(H), hc(H), h(H);
    for (std::size_t i = 0; i < H; ++i) {
        double ar = w.b_r[i], az = w.b_z[i];
        for (std::size_t j = 0; j < H; ++j) {
            ar += w.w_r(i, j) * h_prev[j];
            az += w.w_z(i, j) * h_prev[j];
        }
        for (std::size_t j = 0; j < I; ++j) {
            ar += w.w_r(i, H + j) * x[j];
            az += w.w_z(i, H + j) * x[j];
        }
        r[i] = 1.0 / (1.0 + std::exp(-ar));
        z[i] = 1.0 / (1.0 + std::exp(-az));
    }
    for (std::size_t i = 0; i < H; ++i) {
        double ah = w.b_h[i];
        for (std::size_t j = 0; j < H; ++j) ah += w.w_h(i, j) * (r[j] * h_prev[j]);
        for (std::size_t j = 0; j < I; ++j) ah += w.w_h(i, H + j) * x[j];
        hc[i] = std::tanh(ah);
    }
    for (std::size_t i = 0; i < H; ++i) h[i] = z[i] * h_prev[i] + (1.0 - z[i]) * hc[i];
    return h;
}

/// Full stacked forward over a window of input rows; softmax probabilities.
inline std::vector<double> gru_forward_scalar(const grad::GruModel& m,
                                              const std::vector<std::vector<double>>& window) {
    std::vector<double> h1(m.layer1.hidden, 0.0), h2(m.layer2.hidden, 0.0);
    for (const auto& x : window) {
        h1 = gru_cell_scalar(m.layer1, x, h1);
        h2 = gru_cell_scalar(m.layer2, h1, h2);
    }
    std::vector<double> logits(m.classes);
    for (std::size_t c = 0; c < m.classes; ++c) {
        double acc = m.head_bias[c];
        for (std::size_t j = 0; j < m.layer2.hidden; ++j) acc += m.head(c, j) * h2[j];
        logits[c] = acc;
    }
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double sum = 0.0;
    std::vector<double> probs(m.classes);
    for (std::size_t c = 0; c < m.classes; ++c) {
        probs[c] = std::exp(logits[c] - mx);
        sum += probs[c];
    }
    for (auto& v : probs) v /= sum;
    return probs;
}

}  // namespace oracle
