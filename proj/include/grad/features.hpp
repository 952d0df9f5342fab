// Multi-stage sliding-window features: least-squares trend over a long
// window, dispersion/momentum statistics over a short window, and the
// REMA-derived fields, fused into one frame per time step.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "grad/rema.hpp"
#include "grad/util.hpp"

namespace grad {

struct WindowConfig {
    int regression_window = 20;
    int stat_window = 10;
    int rsi_window = 10;

    void validate() const {
        if (regression_window < 3) throw DataError("regression window must be >= 3");
        if (stat_window < 2 || rsi_window < 2) throw DataError("stat windows must be >= 2");
        if (stat_window > regression_window || rsi_window > regression_window)
            throw DataError("stat windows must not exceed the regression window");
    }
};

struct RegressionFeatures {
    double slope = 0.0;
    double intercept = 0.0;
    double se = 0.0;
};

/// Ordinary least squares against window-local indices 0..n-1.
/// SE = sqrt(sum of squared residuals / (n - 2)).
inline RegressionFeatures regression_features(std::span<const double> window) {
    const std::size_t n = window.size();
    if (n < 3) throw DataError("regression_features: window must have >= 3 points");

    const double fn = static_cast<double>(n);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i);
        sx += x;
        sy += window[i];
        sxx += x * x;
        sxy += x * window[i];
    }
    const double denom = fn * sxx - sx * sx;  // > 0: indices are distinct
    const double slope = (fn * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / fn;

    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = window[i] - (slope * static_cast<double>(i) + intercept);
        ssr += r * r;
    }
    return {slope, intercept, std::sqrt(std::max(0.0, ssr) / (fn - 2.0))};
}

/// Relative strength index over the window's first differences, Wilder's
/// simple-average form. Conventions: no losses -> 100; no movement -> 50.
inline double rsi(std::span<const double> window) {
    if (window.size() < 2) throw DataError("rsi: window must have >= 2 points");
    double gain = 0.0, loss = 0.0;
    for (std::size_t i = 1; i < window.size(); ++i) {
        const double d = window[i] - window[i - 1];
        if (d > 0.0) gain += d;
        else loss -= d;
    }
    if (loss == 0.0 && gain == 0.0) return 50.0;
    if (loss == 0.0) return 100.0;
    const double rs = gain / loss;  // same diff count; means cancel
    return 100.0 - 100.0 / (1.0 + rs);
}

struct StatFeatures {
    double stddev = 0.0;
    double rsi = 50.0;
    double range = 0.0;
    double variation = 0.0;  // incoming - last observed
};

inline StatFeatures stat_features(std::span<const double> window, double incoming) {
    const std::size_t n = window.size();
    if (n < 2) throw DataError("stat_features: window must have >= 2 points");

    double sum = 0.0;
    double lo = window[0], hi = window[0];
    for (double v : window) {
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : window) {
        const double d = v - mean;
        ss += d * d;
    }
    return {std::sqrt(ss / static_cast<double>(n)), rsi(window), hi - lo,
            incoming - window[n - 1]};
}

struct FeatureFrame {
    double slope = 0.0;
    double intercept = 0.0;
    double se = 0.0;
    double stddev = 0.0;
    double rsi = 50.0;
    double range = 0.0;
    double variation = 0.0;
    double ema = 0.0;
    double distance = 0.0;
    double upper_margin = 0.0;
    double lower_margin = 0.0;

    static constexpr std::size_t kCount = 11;
    static constexpr std::array<const char*, kCount> kNames = {
        "slope",     "intercept", "se",  "stddev",       "rsi",         "range",
        "variation", "ema",       "distance", "upper_margin", "lower_margin"};

    std::array<double, kCount> values() const {
        return {slope, intercept, se,  stddev,   rsi,          range,
                variation, ema,  distance, upper_margin, lower_margin};
    }
};

/// Feature-wise z-score statistics, fitted on training frames only.
struct FeatureScaler {
    std::array<double, FeatureFrame::kCount> mean{};
    std::array<double, FeatureFrame::kCount> stddev{};
    bool fitted = false;

    void fit(std::span<const FeatureFrame> frames) {
        if (frames.size() < 2) throw DataError("FeatureScaler: need >= 2 frames to fit");
        mean.fill(0.0);
        stddev.fill(0.0);
        for (const auto& f : frames) {
            const auto v = f.values();
            for (std::size_t k = 0; k < FeatureFrame::kCount; ++k) mean[k] += v[k];
        }
        for (auto& m : mean) m /= static_cast<double>(frames.size());
        for (const auto& f : frames) {
            const auto v = f.values();
            for (std::size_t k = 0; k < FeatureFrame::kCount; ++k) {
                const double d = v[k] - mean[k];
                stddev[k] += d * d;
            }
        }
        for (auto& s : stddev) {
            s = std::sqrt(s / static_cast<double>(frames.size()));
            if (!(s > 0.0)) s = 1.0;  // degenerate feature; leave it centered
        }
        fitted = true;
    }

    std::array<double, FeatureFrame::kCount> apply(const FeatureFrame& f) const {
        auto v = f.values();
        for (std::size_t k = 0; k < FeatureFrame::kCount; ++k) v[k] = (v[k] - mean[k]) / stddev[k];
        return v;
    }
};

/// One raw frame per step from regression_window onward. The frame at step
/// t sees history windows ending at t-1 plus the incoming value at t (via
/// variation and the REMA distance/margins) — nothing later.
inline std::vector<FeatureFrame> assemble_frames(const std::vector<double>& series,
                                                 const std::vector<RemaOutput>& rema_outputs,
                                                 const WindowConfig& config) {
    config.validate();
    if (rema_outputs.size() != series.size())
        throw DataError("assemble_frames: REMA outputs not aligned with series");
    const auto regw = static_cast<std::size_t>(config.regression_window);
    const auto statw = static_cast<std::size_t>(config.stat_window);
    const auto rsiw = static_cast<std::size_t>(config.rsi_window);
    if (series.size() <= regw)
        throw DataError("assemble_frames: series not longer than regression window");

    std::vector<FeatureFrame> frames;
    frames.reserve(series.size() - regw);
    for (std::size_t t = regw; t < series.size(); ++t) {
        const auto reg =
            regression_features(std::span(series).subspan(t - regw, regw));
        const auto stat =
            stat_features(std::span(series).subspan(t - statw, statw), series[t]);
        FeatureFrame f;
        f.slope = reg.slope;
        f.intercept = reg.intercept;
        f.se = reg.se;
        f.stddev = stat.stddev;
        f.rsi = rsiw == statw ? stat.rsi : rsi(std::span(series).subspan(t - rsiw, rsiw));
        f.range = stat.range;
        f.variation = stat.variation;
        f.ema = rema_outputs[t].ema_value;
        f.distance = rema_outputs[t].distance;
        f.upper_margin = rema_outputs[t].upper_margin;
        f.lower_margin = rema_outputs[t].lower_margin;
        frames.push_back(f);
    }
    return frames;
}

}  // namespace grad
