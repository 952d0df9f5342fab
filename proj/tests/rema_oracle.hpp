// Independent batch oracle for the reinforced-EMA recurrence: a literal,
// straight-line transcription over full arrays, kept free of the library's
// streaming detector and ring buffers. Used for the streaming/batch
// bit-equality checks.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "grad/rema.hpp"

namespace oracle {

inline std::vector<grad::RemaOutput> rema_batch(const std::vector<double>& data,
                                                const grad::RemaParams& p) {
    const std::size_t n = data.size();
    const auto ss = static_cast<std::size_t>(p.slide_size);
    std::vector<double> ema(n, 0.0);
    std::vector<grad::RemaOutput> out(n);
    double alpha = p.alpha;

    for (std::size_t t = 0; t < n && t < ss; ++t) {
        ema[t] = data[t];
        out[t] = {false, data[t], 0.0, 0.0, 0.0};
    }

    for (std::size_t t = ss; t < n; ++t) {
        // fit
        const double p_value = (ema[t - ss] + ema[t - ss / 2] + ema[t - ss / 3]) / 3.0;
        ema[t] = alpha * data[t - 1] + (1.0 - alpha) * p_value;

        double mean = 0.0;
        for (std::size_t i = t - ss; i < t; ++i) mean += ema[i];
        mean /= static_cast<double>(ss);
        double sq = 0.0;
        for (std::size_t i = t - ss; i < t; ++i) {
            const double d = ema[i] - mean;
            sq += d * d;
        }
        const double sd = std::sqrt(sq / static_cast<double>(ss));
        const double threshold = sd > 1e-9 ? sd : 1e-9;
        const double upper = ema[t] + threshold * p.sensitivity;
        const double lower = ema[t] - threshold * p.sensitivity;

        // check
        const double x = data[t];
        const bool outlier = x < lower || x > upper;
        if (outlier) {
            double m = 0.0;
            for (std::size_t i = t - ss; i < t; ++i) m += ema[i];
            m /= static_cast<double>(ss);
            ema[t] = m;
            alpha = alpha - p.punish > p.alpha_min ? alpha - p.punish : p.alpha_min;
        } else {
            alpha = alpha + p.reward < p.alpha_max ? alpha + p.reward : p.alpha_max;
        }
        out[t] = {outlier, ema[t], std::fabs(x - ema[t]), upper - x, x - lower};
    }
    return out;
}

}  // namespace oracle
