// Reinforced EMA outlier detector. Streaming per-channel state machine:
// each step predicts an EMA value from three lagged EMA readings, derives
// adaptive bounds from the recent EMA spread, flags values outside the
// bounds, substitutes the EMA on outliers, and adapts the smoothing factor
// (punished on outliers, rewarded otherwise). Includes the grid-search
// hyperparameter tuner.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <thread>
#include <vector>

#include "grad/csv.hpp"
#include "grad/inject.hpp"
#include "grad/metrics.hpp"
#include "grad/util.hpp"

namespace grad {

struct RemaParams {
    double alpha = 0.5;
    double alpha_min = 0.1;
    double alpha_max = 0.9;
    double punish = 0.05;
    double reward = 0.01;
    int slide_size = 12;
    double sensitivity = 3.0;

    bool valid() const {
        return alpha > 0.0 && alpha <= 1.0 && alpha_min > 0.0 && alpha_min <= alpha &&
               alpha <= alpha_max && alpha_max <= 1.0 && punish > 0.0 && reward > 0.0 &&
               slide_size >= 3 && sensitivity > 0.0;
    }
    void validate() const {
        if (!valid()) throw DataError("invalid REMA parameters");
    }
};

struct RemaOutput {
    bool is_outlier = false;
    double ema_value = 0.0;
    double distance = 0.0;
    double upper_margin = 0.0;  // upper_bound - x
    double lower_margin = 0.0;  // x - lower_bound
};

namespace detail {

// Bound collapse floor for constant windows, in normalized units.
inline constexpr double kThresholdFloor = 1e-9;

inline double window_mean(const double* w, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += w[i];
    return sum / static_cast<double>(n);
}

// Population standard deviation, chronological accumulation order.
inline double window_std(const double* w, std::size_t n) {
    const double mean = window_mean(w, n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = w[i] - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(n));
}

}  // namespace detail

/// Streaming detector for one channel. O(slide_size) memory; bit-identical
/// to running the fit/check ops over the full history.
class RemaDetector {
public:
    explicit RemaDetector(const RemaParams& params) : params_(params), alpha_(params.alpha) {
        params_.validate();
        ring_.resize(static_cast<std::size_t>(params_.slide_size));
        scratch_.resize(static_cast<std::size_t>(params_.slide_size));
    }

    RemaOutput step(double x) {
        const auto ss = static_cast<std::size_t>(params_.slide_size);
        RemaOutput out;
        if (t_ < ss) {
            // Warm-up: lags are undefined; trust the data, no detection.
            out = {false, x, 0.0, 0.0, 0.0};
            push(x);
            prev_data_ = x;
            ++t_;
            return out;
        }

        // fit: predict from lagged EMA values, bound by the recent spread.
        for (std::size_t i = 0; i < ss; ++i) scratch_[i] = ring_[(t_ + i) % ss];
        const double lag1 = scratch_[0];                             // ema[t - ss]
        const double lag2 = scratch_[ss - ss / 2];                   // ema[t - ss/2]
        const double lag3 = scratch_[ss - ss / 3];                   // ema[t - ss/3]
        const double p_value = (lag1 + lag2 + lag3) / 3.0;
        double ema_t = alpha_ * prev_data_ + (1.0 - alpha_) * p_value;
        const double sd = detail::window_std(scratch_.data(), ss);
        const double threshold = std::max(sd, detail::kThresholdFloor);
        const double upper = ema_t + threshold * params_.sensitivity;
        const double lower = ema_t - threshold * params_.sensitivity;

        // check: flag, substitute, adapt alpha.
        const bool outlier = x < lower || x > upper;
        if (outlier) {
            ema_t = detail::window_mean(scratch_.data(), ss);
            alpha_ = std::max(alpha_ - params_.punish, params_.alpha_min);
        } else {
            alpha_ = std::min(alpha_ + params_.reward, params_.alpha_max);
        }
        out.is_outlier = outlier;
        out.ema_value = ema_t;
        out.distance = std::abs(x - ema_t);
        out.upper_margin = upper - x;
        out.lower_margin = x - lower;

        push(ema_t);
        prev_data_ = x;
        ++t_;
        return out;
    }

    double alpha() const { return alpha_; }
    std::size_t steps() const { return t_; }
    const RemaParams& params() const { return params_; }

private:
    void push(double ema_value) {
        ring_[t_ % ring_.size()] = ema_value;
    }

    RemaParams params_;
    double alpha_;
    double prev_data_ = 0.0;
    std::size_t t_ = 0;
    std::vector<double> ring_;     // last slide_size EMA values
    std::vector<double> scratch_;  // chronological window view
};

// ---------------------------------------------------------------------------
// Batch-state form of the same step (the spec's fit/check operations).
// ---------------------------------------------------------------------------

struct RemaState {
    std::vector<double> ema;
    double alpha_current = 0.0;
    double upper_bound = 0.0;
    double lower_bound = 0.0;
    double distance = 0.0;
    std::size_t step_count = 0;
    bool fitted = false;
};

inline RemaState make_rema_state(const RemaParams& params) {
    params.validate();
    RemaState st;
    st.alpha_current = params.alpha;
    return st;
}

/// Warm-up step (t < slide_size): trust the reading, no detection.
inline RemaOutput rema_warmup(RemaState& st, const RemaParams& params, double x) {
    if (st.ema.size() >= static_cast<std::size_t>(params.slide_size))
        throw DataError("rema_warmup: warm-up already complete");
    st.ema.push_back(x);
    st.distance = 0.0;
    st.step_count = st.ema.size();
    return {false, x, 0.0, 0.0, 0.0};
}

inline void rema_fit(RemaState& st, const RemaParams& params, std::size_t t,
                     const std::vector<double>& data) {
    const auto ss = static_cast<std::size_t>(params.slide_size);
    if (t < ss) throw DataError("rema_fit: called before warm-up is complete");
    if (st.ema.size() != t) throw DataError("rema_fit: EMA history not aligned with step index");
    if (data.size() < t) throw DataError("rema_fit: data history too short");

    const double* window = &st.ema[t - ss];
    const double lag1 = window[0];
    const double lag2 = window[ss - ss / 2];
    const double lag3 = window[ss - ss / 3];
    const double p_value = (lag1 + lag2 + lag3) / 3.0;
    const double ema_t = st.alpha_current * data[t - 1] + (1.0 - st.alpha_current) * p_value;
    const double sd = detail::window_std(window, ss);
    const double threshold = std::max(sd, detail::kThresholdFloor);

    st.ema.push_back(ema_t);
    st.upper_bound = ema_t + threshold * params.sensitivity;
    st.lower_bound = ema_t - threshold * params.sensitivity;
    st.fitted = true;
}

inline RemaOutput rema_check(RemaState& st, const RemaParams& params, std::size_t t, double x) {
    const auto ss = static_cast<std::size_t>(params.slide_size);
    if (!st.fitted || st.ema.size() != t + 1)
        throw DataError("rema_check: rema_fit has not run for this step");

    const bool outlier = x < st.lower_bound || x > st.upper_bound;
    if (outlier) {
        st.ema[t] = detail::window_mean(&st.ema[t - ss], ss);
        st.alpha_current = std::max(st.alpha_current - params.punish, params.alpha_min);
    } else {
        st.alpha_current = std::min(st.alpha_current + params.reward, params.alpha_max);
    }
    st.distance = std::abs(x - st.ema[t]);
    st.fitted = false;
    st.step_count = t + 1;
    return {outlier, st.ema[t], st.distance, st.upper_bound - x, x - st.lower_bound};
}

/// Full-series pass: warm-up, then fit/check per step.
inline std::vector<RemaOutput> rema_stream(const std::vector<double>& series,
                                           const RemaParams& params) {
    params.validate();
    if (series.size() <= static_cast<std::size_t>(params.slide_size))
        throw DataError("rema_stream: series not longer than slide_size");
    RemaDetector detector(params);
    std::vector<RemaOutput> out;
    out.reserve(series.size());
    for (double x : series) out.push_back(detector.step(x));
    return out;
}

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

struct RemaGrid {
    std::vector<double> alpha = {0.3, 0.5, 0.7};
    std::vector<double> alpha_min = {0.05, 0.1};
    std::vector<double> alpha_max = {0.9, 0.99};
    std::vector<double> punish = {0.05, 0.1};
    std::vector<double> reward = {0.01, 0.02};
    std::vector<int> slide_size = {8, 12, 20};
    std::vector<double> sensitivity = {2.0, 3.0, 4.0};

    std::vector<RemaParams> combinations() const {
        std::vector<RemaParams> combos;
        for (double a : alpha)
            for (double amin : alpha_min)
                for (double amax : alpha_max)
                    for (double p : punish)
                        for (double r : reward)
                            for (int ss : slide_size)
                                for (double s : sensitivity) {
                                    RemaParams c{a, amin, amax, p, r, ss, s};
                                    if (c.valid()) combos.push_back(c);
                                }
        return combos;
    }
};

struct GridEntry {
    std::size_t combo_id = 0;
    RemaParams params;
    double f1_anomaly = 0.0;
    double f1_normal = 0.0;
    double score = 0.0;  // mean of the two F1 scores
};

struct GridSearchResult {
    GridEntry best;
    std::vector<GridEntry> table;
};

/// Run one parameter set over the injected channels of a labeled series and
/// score detection. Steps before the detector's own warm-up are excluded.
inline GridEntry evaluate_rema_params(const LabeledSeries& labeled, const RemaParams& params,
                                      std::size_t eval_end, std::size_t combo_id) {
    std::vector<char> pred, truth;
    for (Channel c : labeled.injected_channels) {
        const auto& ch = labeled.channel(c);
        RemaDetector detector(params);
        for (std::size_t i = 0; i < eval_end; ++i) {
            const RemaOutput out = detector.step(ch.corrupted[i]);
            if (i < static_cast<std::size_t>(params.slide_size)) continue;
            pred.push_back(out.is_outlier ? 1 : 0);
            truth.push_back(ch.labels[i].anomaly ? 1 : 0);
        }
    }
    const DetectionScore score = score_detection(pred, truth);
    return {combo_id, params, score.anomaly.f1, score.normal.f1, score.overall_f1()};
}

inline bool grid_entry_better(const GridEntry& a, const GridEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.f1_anomaly != b.f1_anomaly) return a.f1_anomaly > b.f1_anomaly;
    if (a.params.slide_size != b.params.slide_size)
        return a.params.slide_size < b.params.slide_size;
    if (a.params.sensitivity != b.params.sensitivity)
        return a.params.sensitivity < b.params.sensitivity;
    return a.combo_id < b.combo_id;
}

/// Exhaustive grid search, parallel across combinations. The result is
/// independent of thread scheduling: every combination is scored and the
/// argmax uses a total order.
inline GridSearchResult grid_search(const LabeledSeries& labeled, const RemaGrid& grid,
                                    std::size_t eval_end = SIZE_MAX) {
    if (labeled.injected_channels.empty())
        throw DataError("grid_search: labeled series has no injected channels");
    eval_end = std::min(eval_end, labeled.size());

    const std::vector<RemaParams> combos = grid.combinations();
    if (combos.empty()) throw DataError("grid_search: no valid parameter combinations");

    bool has_anomaly = false, has_normal = false;
    for (Channel c : labeled.injected_channels)
        for (std::size_t i = 0; i < eval_end; ++i)
            (labeled.channel(c).labels[i].anomaly ? has_anomaly : has_normal) = true;
    if (!has_anomaly || !has_normal)
        throw DataError("grid_search: labeled data must contain both classes");

    GridSearchResult result;
    result.table.resize(combos.size());

    std::atomic<std::size_t> next{0};
    const unsigned n_threads =
        std::max(1u, std::min(std::thread::hardware_concurrency(),
                              static_cast<unsigned>(combos.size())));
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= combos.size()) return;
            result.table[i] = evaluate_rema_params(labeled, combos[i], eval_end, i);
        }
    };
    std::vector<std::thread> threads;
    for (unsigned i = 1; i < n_threads; ++i) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    result.best = result.table[0];
    for (const auto& entry : result.table)
        if (grid_entry_better(entry, result.best)) result.best = entry;
    return result;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

inline void save_rema_params(const std::string& path, const RemaParams& p, double score) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open file for writing: " + path);
    out << "alpha=" << format_double17(p.alpha) << "\n"
        << "alpha_min=" << format_double17(p.alpha_min) << "\n"
        << "alpha_max=" << format_double17(p.alpha_max) << "\n"
        << "punish=" << format_double17(p.punish) << "\n"
        << "reward=" << format_double17(p.reward) << "\n"
        << "slide_size=" << p.slide_size << "\n"
        << "sensitivity=" << format_double17(p.sensitivity) << "\n"
        << "score=" << format_double17(score) << "\n";
}

inline std::pair<RemaParams, double> load_rema_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);
    RemaParams p;
    double score = 0.0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        double v;
        if (!parse_double(value, v)) throw DataError("malformed params file: " + path);
        if (key == "alpha") p.alpha = v;
        else if (key == "alpha_min") p.alpha_min = v;
        else if (key == "alpha_max") p.alpha_max = v;
        else if (key == "punish") p.punish = v;
        else if (key == "reward") p.reward = v;
        else if (key == "slide_size") p.slide_size = static_cast<int>(v);
        else if (key == "sensitivity") p.sensitivity = v;
        else if (key == "score") score = v;
    }
    p.validate();
    return {p, score};
}

inline void save_grid_report(const std::string& path, const GridSearchResult& result) {
    CsvWriter w(path);
    w.row({"combo_id", "alpha", "alpha_min", "alpha_max", "punish", "reward", "slide_size",
           "sensitivity", "f1_anomaly", "f1_normal", "score"});
    for (const auto& e : result.table)
        w.row({std::to_string(e.combo_id), format_double(e.params.alpha),
               format_double(e.params.alpha_min), format_double(e.params.alpha_max),
               format_double(e.params.punish), format_double(e.params.reward),
               std::to_string(e.params.slide_size), format_double(e.params.sensitivity),
               format_double(e.f1_anomaly), format_double(e.f1_normal), format_double(e.score)});
}

}  // namespace grad
