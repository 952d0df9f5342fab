// Rule-based temporal typing of detected anomalies (run-length counter
// plus episode-recurrence memory) and EMA-based recovery of repairable
// readings. Permanent faults hold the last trustworthy value and raise
// one alert per run.
#pragma once

#include <cstddef>
#include <deque>
#include <limits>
#include <vector>

#include "grad/inject.hpp"
#include "grad/trace.hpp"
#include "grad/util.hpp"

namespace grad {

struct TimeClassifierConfig {
    int transient_max = 2;
    int intermittent_min_episodes = 3;
    int horizon = 50;
    int permanent_min = 20;

    void validate() const {
        if (transient_max < 1 || intermittent_min_episodes < 2 || horizon < 2 ||
            permanent_min < 2)
            throw DataError("invalid time classifier configuration");
    }
};

/// Streaming per-channel state machine. Steps must arrive strictly in
/// order. Within one anomaly run the label never downgrades.
class TimeClassifier {
public:
    explicit TimeClassifier(const TimeClassifierConfig& cfg = {}) : cfg_(cfg) { cfg_.validate(); }

    TimeType step(bool is_anomaly, std::size_t step_index) {
        if (has_last_ && step_index != last_step_ + 1)
            throw DataError("TimeClassifier: steps must be presented strictly in order");
        has_last_ = true;
        last_step_ = step_index;

        // Decay memory beyond the recurrence horizon.
        while (!episodes_.empty() &&
               episodes_.front() + static_cast<std::size_t>(cfg_.horizon) < step_index)
            episodes_.pop_front();

        if (!is_anomaly) {
            if (consecutive_ > 0) episodes_.push_back(step_index - 1);  // run just ended
            consecutive_ = 0;
            run_label_ = TimeType::none;
            return TimeType::none;
        }

        ++consecutive_;
        TimeType label;
        if (consecutive_ >= cfg_.permanent_min) {
            label = TimeType::permanent;
        } else if (static_cast<int>(episodes_.size()) + 1 >= cfg_.intermittent_min_episodes) {
            label = TimeType::intermittent;
        } else {
            label = TimeType::transient;
        }
        if (static_cast<int>(label) > static_cast<int>(run_label_)) run_label_ = label;
        return run_label_;
    }

    int consecutive_count() const { return consecutive_; }
    std::size_t episodes_in_memory() const { return episodes_.size(); }

private:
    TimeClassifierConfig cfg_;
    int consecutive_ = 0;
    TimeType run_label_ = TimeType::none;
    std::deque<std::size_t> episodes_;  // end indices of recent runs
    std::size_t last_step_ = 0;
    bool has_last_ = false;
};

enum class RecoveryAction : int { passthrough = 0, replaced = 1, alert = 2 };

inline const char* to_string(RecoveryAction a) {
    switch (a) {
        case RecoveryAction::passthrough: return "passthrough";
        case RecoveryAction::replaced: return "replaced";
        case RecoveryAction::alert: return "alert";
    }
    return "?";
}

struct RecoveryOutput {
    double value = 0.0;  // raw units
    RecoveryAction action = RecoveryAction::passthrough;
    TimeType time_type = TimeType::none;
    BiasType bias_type = BiasType::none;
};

struct AlertEvent {
    std::size_t step = 0;
    int run_length = 0;
};

/// Streaming recovery for one channel. Normal readings pass through;
/// transient/intermittent anomalies are replaced with the denormalized EMA
/// estimate; permanent runs hold the last trustworthy value, are marked
/// unreliable, and log a single alert when the run escalates.
class Recoverer {
public:
    Recoverer(Channel channel, const NormStats& stats) : channel_(channel), stats_(stats) {}

    RecoveryOutput step(std::size_t step_index, double x_raw, bool detect, BiasType bias_type,
                        TimeType time_type, double ema_normalized) {
        RecoveryOutput out;
        out.time_type = time_type;
        out.bias_type = detect ? bias_type : BiasType::none;

        if (!detect) {
            out.action = RecoveryAction::passthrough;
            out.value = x_raw;
            last_trusted_ = x_raw;
            has_trusted_ = true;
            in_permanent_ = false;
            run_length_ = 0;
            return out;
        }

        ++run_length_;
        if (time_type == TimeType::permanent) {
            if (!in_permanent_) {
                alerts_.push_back({step_index, run_length_});
                in_permanent_ = true;
            }
            out.action = RecoveryAction::alert;
            out.value = has_trusted_ ? last_trusted_
                                     : denormalize(ema_normalized, stats_, channel_);
            return out;
        }

        in_permanent_ = false;
        out.action = RecoveryAction::replaced;
        out.value = denormalize(ema_normalized, stats_, channel_);
        last_trusted_ = out.value;
        has_trusted_ = true;
        return out;
    }

    const std::vector<AlertEvent>& alerts() const { return alerts_; }

private:
    Channel channel_;
    NormStats stats_;
    double last_trusted_ = 0.0;
    bool has_trusted_ = false;
    bool in_permanent_ = false;
    int run_length_ = 0;
    std::vector<AlertEvent> alerts_;
};

}  // namespace grad
