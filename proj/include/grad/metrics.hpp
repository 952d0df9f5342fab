// Detection / classification scoring: per-class precision, recall, F1 and
// confusion matrices. Zero-denominator cases are defined as 0 and flagged.
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "grad/util.hpp"

namespace grad {

struct ClassMetrics {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
    bool zero_division = false;  // some denominator was zero

    void finalize() {
        zero_division = false;
        if (tp + fp > 0) {
            precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        } else {
            precision = 0.0;
            zero_division = true;
        }
        if (tp + fn > 0) {
            recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
        } else {
            recall = 0.0;
            zero_division = true;
        }
        if (precision + recall > 0.0) {
            f1 = 2.0 * precision * recall / (precision + recall);
        } else {
            f1 = 0.0;
            zero_division = true;
        }
    }
};

struct DetectionScore {
    ClassMetrics normal;   // negative class: normal readings
    ClassMetrics anomaly;  // positive class: anomalous readings

    /// Arithmetic mean of the two per-class F1 scores.
    double overall_f1() const { return 0.5 * (normal.f1 + anomaly.f1); }
};

/// Score binary detection. `pred`/`truth`: true = anomaly.
inline DetectionScore score_detection(std::span<const char> pred, std::span<const char> truth) {
    if (pred.size() != truth.size()) throw DataError("score_detection: length mismatch");
    DetectionScore s;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i] != 0, t = truth[i] != 0;
        if (p && t) {
            ++s.anomaly.tp;
            ++s.normal.tn;
        } else if (p && !t) {
            ++s.anomaly.fp;
            ++s.normal.fn;
        } else if (!p && t) {
            ++s.anomaly.fn;
            ++s.normal.fp;
        } else {
            ++s.anomaly.tn;
            ++s.normal.tp;
        }
    }
    s.normal.finalize();
    s.anomaly.finalize();
    return s;
}

struct ConfusionMatrix {
    std::vector<std::string> labels;
    std::vector<std::size_t> counts;  // row: true class, col: predicted class

    explicit ConfusionMatrix(std::vector<std::string> lbls = {})
        : labels(std::move(lbls)), counts(labels.size() * labels.size(), 0) {}

    std::size_t size() const { return labels.size(); }
    std::size_t& at(std::size_t truth, std::size_t pred) { return counts[truth * size() + pred]; }
    std::size_t at(std::size_t truth, std::size_t pred) const {
        return counts[truth * size() + pred];
    }
    std::size_t total() const {
        std::size_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }
};

struct ClassificationScore {
    ConfusionMatrix matrix;
    std::vector<ClassMetrics> per_class;  // one-vs-rest, aligned with matrix.labels
};

/// Score multi-class predictions on the masked steps only (the mask is the
/// set of true anomalies; scoring normal steps here would be meaningless).
inline ClassificationScore score_classification(std::span<const int> pred,
                                                std::span<const int> truth,
                                                std::span<const char> mask,
                                                std::vector<std::string> labels) {
    if (pred.size() != truth.size() || pred.size() != mask.size())
        throw DataError("score_classification: length mismatch");
    ClassificationScore s{ConfusionMatrix(std::move(labels)), {}};
    const std::size_t k = s.matrix.size();
    std::size_t evaluated = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!mask[i]) continue;
        const auto t = static_cast<std::size_t>(truth[i]);
        const auto p = static_cast<std::size_t>(pred[i]);
        if (t >= k || p >= k) throw DataError("score_classification: class index out of range");
        ++s.matrix.at(t, p);
        ++evaluated;
    }
    if (evaluated == 0) throw DataError("score_classification: empty evaluation mask");

    s.per_class.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        ClassMetrics& m = s.per_class[c];
        for (std::size_t t = 0; t < k; ++t)
            for (std::size_t p = 0; p < k; ++p) {
                const std::size_t n = s.matrix.at(t, p);
                if (t == c && p == c) m.tp += n;
                else if (t == c) m.fn += n;
                else if (p == c) m.fp += n;
                else m.tn += n;
            }
        m.finalize();
    }
    return s;
}

}  // namespace grad
