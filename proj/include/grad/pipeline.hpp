// Glue between the stages: feature computation over labeled series,
// windowed dataset assembly for training, evaluation over a step range,
// and the real-time per-channel streaming pipeline (REMA -> features ->
// GRU -> time classifier -> recovery) with a latency benchmark.
#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <vector>

#include "grad/features.hpp"
#include "grad/gru.hpp"
#include "grad/inject.hpp"
#include "grad/metrics.hpp"
#include "grad/rema.hpp"
#include "grad/timeclass.hpp"
#include "grad/trace.hpp"

namespace grad {

struct SplitBounds {
    std::size_t train_end = 0;
    std::size_t val_end = 0;
};

/// Contiguous 60/20/20-style split over n steps.
inline SplitBounds contiguous_split(std::size_t n, double train_frac = 0.6,
                                    double val_frac = 0.2) {
    if (!(train_frac > 0.0) || !(val_frac >= 0.0) || train_frac + val_frac >= 1.0)
        throw DataError("invalid split fractions");
    SplitBounds b;
    b.train_end = static_cast<std::size_t>(static_cast<double>(n) * train_frac);
    b.val_end = static_cast<std::size_t>(static_cast<double>(n) * (train_frac + val_frac));
    return b;
}

/// REMA outputs and raw feature frames for every injected channel.
struct FeaturePack {
    std::vector<Channel> channels;
    std::vector<std::vector<RemaOutput>> rema;      // [channel][step]
    std::vector<std::vector<FeatureFrame>> frames;  // [channel][step - frame_offset]
    WindowConfig windows;
    std::size_t n_steps = 0;

    std::size_t frame_offset() const {
        return static_cast<std::size_t>(windows.regression_window);
    }
};

inline FeaturePack compute_features(const LabeledSeries& labeled, const RemaParams& rema_params,
                                    const WindowConfig& windows) {
    FeaturePack pack;
    pack.channels = labeled.injected_channels;
    pack.windows = windows;
    pack.n_steps = labeled.size();
    for (Channel c : pack.channels) {
        const auto& series = labeled.channel(c).corrupted;
        pack.rema.push_back(rema_stream(series, rema_params));
        pack.frames.push_back(assemble_frames(series, pack.rema.back(), windows));
    }
    return pack;
}

/// Fit the feature scaler on frames whose step lies in [begin, end).
inline FeatureScaler fit_feature_scaler(const FeaturePack& pack, std::size_t step_begin,
                                        std::size_t step_end) {
    std::vector<FeatureFrame> training;
    const std::size_t off = pack.frame_offset();
    for (const auto& frames : pack.frames)
        for (std::size_t f = 0; f < frames.size(); ++f) {
            const std::size_t step = f + off;
            if (step >= step_begin && step < step_end) training.push_back(frames[f]);
        }
    FeatureScaler scaler;
    scaler.fit(training);
    return scaler;
}

inline std::vector<Mat> scale_pack(const FeaturePack& pack, const FeatureScaler& scaler) {
    std::vector<Mat> out;
    for (const auto& frames : pack.frames) out.push_back(scale_frames(scaler, frames));
    return out;
}

/// Detection samples: every window fully inside [step_begin, step_end),
/// labeled by the final step's ground truth.
inline SequenceDataset make_detection_dataset(const FeaturePack& pack,
                                              std::vector<Mat> scaled,
                                              const LabeledSeries& labeled,
                                              std::size_t step_begin, std::size_t step_end,
                                              std::size_t window) {
    SequenceDataset ds;
    ds.sequences = std::move(scaled);
    const std::size_t off = pack.frame_offset();
    for (std::size_t ci = 0; ci < pack.channels.size(); ++ci) {
        const auto& labels = labeled.channel(pack.channels[ci]).labels;
        const std::size_t n_frames = pack.frames[ci].size();
        for (std::size_t f = window - 1; f < n_frames; ++f) {
            const std::size_t step = f + off;
            const std::size_t first_step = f + 1 - window + off;
            if (first_step < step_begin || step >= step_end) continue;
            ds.samples.push_back({ci, f, labels[step].anomaly ? 1 : 0});
        }
    }
    return ds;
}

/// Bias-classification samples: windows whose final step is a ground-truth
/// anomaly. Labels: noise = 0, jump = 1.
inline SequenceDataset make_bias_dataset(const FeaturePack& pack, std::vector<Mat> scaled,
                                         const LabeledSeries& labeled, std::size_t step_begin,
                                         std::size_t step_end, std::size_t window) {
    SequenceDataset ds;
    ds.sequences = std::move(scaled);
    const std::size_t off = pack.frame_offset();
    for (std::size_t ci = 0; ci < pack.channels.size(); ++ci) {
        const auto& labels = labeled.channel(pack.channels[ci]).labels;
        const std::size_t n_frames = pack.frames[ci].size();
        for (std::size_t f = window - 1; f < n_frames; ++f) {
            const std::size_t step = f + off;
            const std::size_t first_step = f + 1 - window + off;
            if (first_step < step_begin || step >= step_end) continue;
            const AnomalyLabel& l = labels[step];
            if (!l.anomaly) continue;
            ds.samples.push_back({ci, f, l.bias == BiasType::jump ? 1 : 0});
        }
    }
    return ds;
}

inline bool dataset_has_both_classes(const SequenceDataset& ds) {
    bool c0 = false, c1 = false;
    for (const auto& s : ds.samples) (s.label == 0 ? c0 : c1) = true;
    return c0 && c1;
}

// ---------------------------------------------------------------------------
// Evaluation over a step range
// ---------------------------------------------------------------------------

struct EvalOutcome {
    DetectionScore detection;
    bool has_bias_score = false;
    ClassificationScore bias;  // masked to detected true anomalies
    bool has_time_score = false;
    ClassificationScore time;  // same mask
    std::size_t evaluated_steps = 0;
};

/// Run detector (+ optional bias classifier) over every channel's frames,
/// derive time types from the detector stream, and score against ground
/// truth on [step_begin, step_end). The first
/// max(regression_window, slide_size) + window - 1 steps are never scored.
inline EvalOutcome evaluate_models(const FeaturePack& pack, const LabeledSeries& labeled,
                                   const GruModel& detector, const GruModel* bias_clf,
                                   const RemaParams& rema_params,
                                   const TimeClassifierConfig& time_cfg, std::size_t step_begin,
                                   std::size_t step_end) {
    const std::size_t off = pack.frame_offset();
    const std::size_t warmup =
        std::max(off, static_cast<std::size_t>(rema_params.slide_size)) + detector.window - 1;
    step_begin = std::max(step_begin, warmup);
    step_end = std::min(step_end, pack.n_steps);

    std::vector<char> det_pred, det_truth, mask;
    std::vector<int> bias_pred, bias_truth, time_pred, time_truth;

    EvalOutcome out;
    for (std::size_t ci = 0; ci < pack.channels.size(); ++ci) {
        const auto& labels = labeled.channel(pack.channels[ci]).labels;
        const auto preds = predict_stream(detector, bias_clf, pack.frames[ci]);

        TimeClassifier time_clf(time_cfg);
        std::vector<TimeType> time_types(pack.n_steps, TimeType::none);
        for (std::size_t step = 0; step < pack.n_steps; ++step) {
            const bool detect =
                step >= off && preds[step - off].detect;
            time_types[step] = time_clf.step(detect, step);
        }

        for (std::size_t step = step_begin; step < step_end; ++step) {
            const StepPrediction& p = preds[step - off];
            const AnomalyLabel& t = labels[step];
            det_pred.push_back(p.detect ? 1 : 0);
            det_truth.push_back(t.anomaly ? 1 : 0);
            const bool in_mask = t.anomaly && p.detect;
            mask.push_back(in_mask ? 1 : 0);
            bias_pred.push_back(p.bias == BiasType::jump ? 1 : 0);
            bias_truth.push_back(t.bias == BiasType::jump ? 1 : 0);
            time_pred.push_back(static_cast<int>(time_types[step]) - 1);
            time_truth.push_back(static_cast<int>(t.time) - 1);
        }
    }

    out.detection = score_detection(det_pred, det_truth);
    out.evaluated_steps = det_pred.size();
    bool any_masked = false;
    for (char m : mask) any_masked |= m != 0;
    if (any_masked && bias_clf) {
        out.bias = score_classification(bias_pred, bias_truth, mask, {"noise", "jump"});
        out.has_bias_score = true;
    }
    if (any_masked) {
        // Time predictions may include "none" (= -1) on detector misses
        // inside the mask; clamp into the matrix as transient.
        for (auto& v : time_pred) v = std::clamp(v, 0, 2);
        for (auto& v : time_truth) v = std::clamp(v, 0, 2);
        out.time = score_classification(time_pred, time_truth, mask,
                                        {"transient", "intermittent", "permanent"});
        out.has_time_score = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Streaming pipeline
// ---------------------------------------------------------------------------

struct PipelineConfig {
    RemaParams rema;
    WindowConfig windows;
    TimeClassifierConfig time;
};

/// Real-time path for one channel: raw reading in, recovered reading out.
/// Single-writer; one instance per stream.
class ChannelPipeline {
public:
    ChannelPipeline(Channel channel, const NormStats& stats, const PipelineConfig& cfg,
                    const GruModel* detector, const GruModel* bias_clf)
        : channel_(channel),
          stats_(stats),
          cfg_(cfg),
          detector_(detector),
          bias_clf_(bias_clf),
          rema_(cfg.rema),
          time_clf_(cfg.time),
          recoverer_(channel, stats) {
        cfg_.windows.validate();
        if (detector_) {
            detector_->validate();
            window_buf_ = Mat(detector_->window, detector_->input_dim);
            if (bias_clf_ && (bias_clf_->window != detector_->window ||
                              bias_clf_->schema_hash != detector_->schema_hash))
                throw DataError("ChannelPipeline: detector and classifier schema mismatch");
        }
    }

    struct StepResult {
        RemaOutput rema;
        bool has_prediction = false;
        StepPrediction pred;
        TimeType time_type = TimeType::none;
        RecoveryOutput recovery;
    };

    StepResult push(double raw_value) {
        StepResult r;
        const double x = normalize_value(raw_value, stats_, channel_);
        r.rema = rema_.step(x);
        history_.push_back(x);
        const auto regw = static_cast<std::size_t>(cfg_.windows.regression_window);
        if (history_.size() > regw + 1) history_.erase(history_.begin());

        if (detector_ && t_ >= regw) {
            const FeatureFrame frame = make_frame(x, r.rema);
            push_frame(frame);
            if (frames_seen_ >= detector_->window) {
                fill_window();
                const Vec probs = forward_window(*detector_, window_buf_, 0);
                r.pred.probs = {probs[0], probs[1]};
                r.pred.detect = probs[1] > probs[0];
                if (r.pred.detect && bias_clf_) {
                    fill_window_for(*bias_clf_);
                    const Vec bp = forward_window(*bias_clf_, window_buf_, 0);
                    r.pred.bias = bp[1] > bp[0] ? BiasType::jump : BiasType::noise;
                }
                r.has_prediction = true;
            }
        }

        r.time_type = time_clf_.step(r.pred.detect, t_);
        r.recovery = recoverer_.step(t_, raw_value, r.pred.detect, r.pred.bias, r.time_type,
                                     r.rema.ema_value);
        ++t_;
        return r;
    }

    const std::vector<AlertEvent>& alerts() const { return recoverer_.alerts(); }
    std::size_t steps() const { return t_; }

private:
    FeatureFrame make_frame(double incoming, const RemaOutput& rema_out) const {
        // history_ ends with the incoming value; windows end just before it.
        const auto regw = static_cast<std::size_t>(cfg_.windows.regression_window);
        const auto statw = static_cast<std::size_t>(cfg_.windows.stat_window);
        const auto rsiw = static_cast<std::size_t>(cfg_.windows.rsi_window);
        const std::size_t last = history_.size() - 1;  // index of incoming
        const std::span<const double> hist(history_.data(), last);

        const auto reg = regression_features(hist.subspan(last - regw, regw));
        const auto stat = stat_features(hist.subspan(last - statw, statw), incoming);
        FeatureFrame f;
        f.slope = reg.slope;
        f.intercept = reg.intercept;
        f.se = reg.se;
        f.stddev = stat.stddev;
        f.rsi = rsiw == statw ? stat.rsi : rsi(hist.subspan(last - rsiw, rsiw));
        f.range = stat.range;
        f.variation = stat.variation;
        f.ema = rema_out.ema_value;
        f.distance = rema_out.distance;
        f.upper_margin = rema_out.upper_margin;
        f.lower_margin = rema_out.lower_margin;
        return f;
    }

    void push_frame(const FeatureFrame& f) {
        if (frame_ring_.size() < detector_->window) {
            frame_ring_.push_back(f);
        } else {
            frame_ring_[frames_seen_ % detector_->window] = f;
        }
        ++frames_seen_;
    }

    void fill_window() { fill_window_for(*detector_); }

    void fill_window_for(const GruModel& model) {
        const std::size_t w = model.window;
        for (std::size_t i = 0; i < w; ++i) {
            const FeatureFrame& f = frame_ring_[(frames_seen_ + i) % w];
            const auto v = model.scaler.fitted ? model.scaler.apply(f) : f.values();
            for (std::size_t k = 0; k < model.input_dim; ++k) window_buf_(i, k) = v[k];
        }
    }

    Channel channel_;
    NormStats stats_;
    PipelineConfig cfg_;
    const GruModel* detector_;
    const GruModel* bias_clf_;
    RemaDetector rema_;
    TimeClassifier time_clf_;
    Recoverer recoverer_;
    std::vector<double> history_;      // last regression_window + 1 normalized values
    std::vector<FeatureFrame> frame_ring_;
    std::size_t frames_seen_ = 0;
    Mat window_buf_;
    std::size_t t_ = 0;
};

struct LatencyStats {
    double median_s = 0.0;
    double p99_s = 0.0;
    double mean_s = 0.0;
    std::size_t points = 0;
};

/// Per-point wall time of the full pipeline over in-memory readings
/// (no I/O). One untimed warm-up pass, then `repetitions` timed passes
/// over fresh pipelines.
template <typename MakePipeline>
LatencyStats bench_latency(MakePipeline&& make_pipeline, std::span<const double> raw_values,
                           std::size_t repetitions) {
    if (raw_values.empty()) throw DataError("bench_latency: empty stream");
    if (repetitions < 3) throw DataError("bench_latency: need at least 3 repetitions");

    {
        auto pipe = make_pipeline();
        for (double v : raw_values) pipe.push(v);
    }

    std::vector<double> durations;
    durations.reserve(raw_values.size() * repetitions);
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
        auto pipe = make_pipeline();
        for (double v : raw_values) {
            const auto t0 = std::chrono::steady_clock::now();
            pipe.push(v);
            const auto t1 = std::chrono::steady_clock::now();
            durations.push_back(std::chrono::duration<double>(t1 - t0).count());
        }
    }

    std::sort(durations.begin(), durations.end());
    LatencyStats stats;
    stats.points = durations.size();
    stats.median_s = durations[durations.size() / 2];
    stats.p99_s = durations[std::min(durations.size() - 1,
                                     static_cast<std::size_t>(0.99 * durations.size()))];
    double sum = 0.0;
    for (double d : durations) sum += d;
    stats.mean_s = sum / static_cast<double>(durations.size());
    return stats;
}

}  // namespace grad
