// Synthetic clean GPS traces for desk-scale experiments: a vehicle (or
// low-altitude aerial) motion model integrated at 1 Hz with small
// measurement noise. Used when the public datasets are not on disk.
#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "grad/rng.hpp"
#include "grad/trace.hpp"

namespace grad {

struct SynthConfig {
    std::size_t length = 50000;
    double dt = 1.0;                 // seconds per sample
    double base_latitude = 33.845;   // trajectory origin
    double base_longitude = -112.135;
    double mean_speed = 12.0;        // m/s cruise target
    double speed_pull = 0.05;        // pull toward cruise speed per step
    double speed_noise = 0.4;        // accel randomness, m/s per step
    double heading_noise = 0.02;     // rad random walk per step
    double turn_prob = 0.004;        // chance of a deliberate turn per step
    double stop_prob = 0.001;        // chance of entering a stop phase
    double position_noise_m = 1.2;   // GPS jitter, metres
    double speed_meas_noise = 0.15;  // m/s
    std::string source_id = "synthetic";
};

/// Arterial-corridor driving profile (second-by-second vehicle trajectories).
inline SynthConfig mmitss_like_config(std::size_t length = 50000) {
    SynthConfig c;
    c.length = length;
    c.base_latitude = 33.845;
    c.base_longitude = -112.135;
    c.mean_speed = 14.0;
    c.stop_prob = 0.002;  // signalized intersections
    c.source_id = "synthetic-mmitss";
    return c;
}

/// Low-altitude urban aerial profile: slower, smoother, hover phases.
inline SynthConfig zurich_like_config(std::size_t length = 20000) {
    SynthConfig c;
    c.length = length;
    c.base_latitude = 47.3769;
    c.base_longitude = 8.5417;
    c.mean_speed = 4.0;
    c.speed_pull = 0.08;
    c.speed_noise = 0.25;
    c.heading_noise = 0.03;
    c.turn_prob = 0.006;
    c.stop_prob = 0.003;  // hover
    c.position_noise_m = 0.8;
    c.speed_meas_noise = 0.1;
    c.source_id = "synthetic-zurich";
    return c;
}

inline Trace synth_trace(const SynthConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    Trace trace;
    trace.source_id = cfg.source_id;

    constexpr double kMetersPerDegLat = 111320.0;
    double lat = cfg.base_latitude;
    double lon = cfg.base_longitude;
    double speed = cfg.mean_speed * 0.5;
    double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    int stop_steps = 0;

    for (std::size_t i = 0; i < cfg.length; ++i) {
        if (stop_steps > 0) {
            --stop_steps;
            speed = std::max(0.0, speed - 1.5);
        } else {
            if (rng.uniform01() < cfg.stop_prob) stop_steps = static_cast<int>(rng.int_range(5, 30));
            speed += cfg.speed_pull * (cfg.mean_speed - speed) + rng.gaussian(0.0, cfg.speed_noise);
            speed = std::clamp(speed, 0.0, cfg.mean_speed * 2.5);
        }

        heading += rng.gaussian(0.0, cfg.heading_noise);
        if (rng.uniform01() < cfg.turn_prob)
            heading += rng.uniform(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);

        const double dist = speed * cfg.dt;
        lat += dist * std::cos(heading) / kMetersPerDegLat;
        lon += dist * std::sin(heading) /
               (kMetersPerDegLat * std::max(0.2, std::cos(lat * std::numbers::pi / 180.0)));

        GpsReading r;
        r.timestamp = static_cast<double>(i) * cfg.dt;
        r.latitude = lat + rng.gaussian(0.0, cfg.position_noise_m / kMetersPerDegLat);
        r.longitude = lon + rng.gaussian(0.0, cfg.position_noise_m / kMetersPerDegLat);
        r.speed = std::max(0.0, speed + rng.gaussian(0.0, cfg.speed_meas_noise));
        trace.push_back(r);
    }
    return trace;
}

inline void write_trace_csv(const std::string& path, const Trace& trace) {
    CsvWriter w(path);
    w.row({"timestamp", "latitude", "longitude", "speed"});
    for (std::size_t i = 0; i < trace.size(); ++i) {
        w.row({format_double(trace.timestamps[i]), format_double(trace.channels[0][i]),
               format_double(trace.channels[1][i]), format_double(trace.channels[2][i])});
    }
}

inline Trace read_trace_csv(const std::string& path, const ColumnMapping& cols = {}) {
    ParseResult result = parse_trace(path, cols);
    if (!result.rejects.empty())
        throw DataError(path + ": " + std::to_string(result.rejects.size()) + " rejected rows");
    return std::move(result.trace);
}

}  // namespace grad
