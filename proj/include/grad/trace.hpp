// GPS trace ingestion: CSV parsing with row-level rejects, temporal
// ordering with merge of simultaneous readings, gap interpolation, and
// z-score normalization with persistable per-channel statistics.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "grad/csv.hpp"
#include "grad/util.hpp"

namespace grad {

enum class Channel : int { latitude = 0, longitude = 1, speed = 2 };

inline constexpr std::size_t kNumChannels = 3;
inline constexpr std::array<const char*, kNumChannels> kChannelNames = {"latitude", "longitude",
                                                                        "speed"};

inline const char* channel_name(Channel c) { return kChannelNames[static_cast<int>(c)]; }

inline Channel channel_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kNumChannels; ++i)
        if (name == kChannelNames[i]) return static_cast<Channel>(i);
    throw DataError("unknown channel: " + std::string(name));
}

/// One timestamped sensor sample. NaN encodes a missing value.
struct GpsReading {
    double timestamp = 0.0;
    double latitude = std::numeric_limits<double>::quiet_NaN();
    double longitude = std::numeric_limits<double>::quiet_NaN();
    double speed = std::numeric_limits<double>::quiet_NaN();

    double channel(Channel c) const {
        switch (c) {
            case Channel::latitude: return latitude;
            case Channel::longitude: return longitude;
            case Channel::speed: return speed;
        }
        return std::numeric_limits<double>::quiet_NaN();
    }
};

/// Column-major trace; channel order is fixed (latitude, longitude, speed).
struct Trace {
    std::string source_id;
    std::vector<double> timestamps;
    std::array<std::vector<double>, kNumChannels> channels;

    std::size_t size() const { return timestamps.size(); }

    std::vector<double>& channel(Channel c) { return channels[static_cast<int>(c)]; }
    const std::vector<double>& channel(Channel c) const { return channels[static_cast<int>(c)]; }

    void push_back(const GpsReading& r) {
        timestamps.push_back(r.timestamp);
        channels[0].push_back(r.latitude);
        channels[1].push_back(r.longitude);
        channels[2].push_back(r.speed);
    }
};

struct ColumnMapping {
    std::string timestamp = "timestamp";
    std::string latitude = "latitude";
    std::string longitude = "longitude";
    std::string speed = "speed";
};

struct RejectEntry {
    std::size_t row_number;  // 1-based data row index
    std::string reason;
};

struct ParseResult {
    Trace trace;
    std::vector<RejectEntry> rejects;
};

namespace detail {

// Missing encodings: empty cell or the literal NaN (any case).
inline bool is_missing_token(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) return true;
    if (s.size() != 3) return false;
    auto lower = [](char c) { return static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c); };
    return lower(s[0]) == 'n' && lower(s[1]) == 'a' && lower(s[2]) == 'n';
}

}  // namespace detail

inline ParseResult parse_trace(const std::string& path, const ColumnMapping& cols = {}) {
    CsvTable table = read_csv(path);
    const int ct = table.column(cols.timestamp);
    const int cla = table.column(cols.latitude);
    const int clo = table.column(cols.longitude);
    const int csp = table.column(cols.speed);
    if (ct < 0 || cla < 0 || clo < 0 || csp < 0)
        throw DataError("malformed header in " + path + ": declared columns not all present");

    ParseResult result;
    result.trace.source_id = path;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::size_t row_number = i + 1;
        const int max_col = std::max({ct, cla, clo, csp});
        if (static_cast<int>(row.size()) <= max_col) {
            result.rejects.push_back({row_number, "missing fields"});
            continue;
        }

        GpsReading r;
        std::string reason;
        auto field = [&](int col, const char* name, double lo, double hi,
                         bool required) -> double {
            const std::string& cell = row[static_cast<std::size_t>(col)];
            if (detail::is_missing_token(cell)) {
                if (required) reason = std::string(name) + " missing";
                return nan;
            }
            double v;
            if (!parse_double(cell, v) || !std::isfinite(v)) {
                reason = std::string("malformed ") + name;
                return nan;
            }
            if (v < lo || v > hi) {
                reason = std::string(name) + " out of range";
                return nan;
            }
            return v;
        };

        r.timestamp = field(ct, "timestamp", -std::numeric_limits<double>::max(),
                            std::numeric_limits<double>::max(), true);
        if (reason.empty()) r.latitude = field(cla, "latitude", -90.0, 90.0, false);
        if (reason.empty()) r.longitude = field(clo, "longitude", -180.0, 180.0, false);
        if (reason.empty())
            r.speed = field(csp, "speed", 0.0, std::numeric_limits<double>::max(), false);
        if (!reason.empty()) {
            result.rejects.push_back({row_number, reason});
            continue;
        }
        result.trace.push_back(r);
    }
    return result;
}

inline void write_rejects_csv(const std::string& path, const std::vector<RejectEntry>& rejects) {
    CsvWriter w(path);
    w.row({"row_number", "reason"});
    for (const auto& r : rejects) w.row({std::to_string(r.row_number), r.reason});
}

/// Sort by timestamp and merge simultaneous readings by per-channel mean
/// (mean of the non-missing values; missing only if all are missing).
inline Trace sort_merge(const Trace& trace) {
    if (trace.size() == 0) throw DataError("sort_merge: empty trace");

    std::vector<std::size_t> order(trace.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return trace.timestamps[a] < trace.timestamps[b];
    });

    Trace out;
    out.source_id = trace.source_id;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        const double t = trace.timestamps[order[i]];
        while (j < order.size() && trace.timestamps[order[j]] == t) ++j;

        out.timestamps.push_back(t);
        for (std::size_t c = 0; c < kNumChannels; ++c) {
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t k = i; k < j; ++k) {
                const double v = trace.channels[c][order[k]];
                if (std::isfinite(v)) {
                    sum += v;
                    ++count;
                }
            }
            out.channels[c].push_back(count ? sum / static_cast<double>(count)
                                            : std::numeric_limits<double>::quiet_NaN());
        }
        i = j;
    }
    return out;
}

struct FillReport {
    std::array<std::size_t, kNumChannels> filled = {0, 0, 0};
};

/// Fill missing values: interior gaps linearly on timestamp, leading and
/// trailing gaps with the nearest valid value.
inline std::pair<Trace, FillReport> interpolate_missing(const Trace& trace) {
    Trace out = trace;
    FillReport report;
    const std::size_t n = trace.size();

    for (std::size_t c = 0; c < kNumChannels; ++c) {
        auto& vals = out.channels[c];
        std::vector<std::size_t> valid;
        for (std::size_t i = 0; i < n; ++i)
            if (std::isfinite(vals[i])) valid.push_back(i);
        if (valid.size() == n) continue;
        if (valid.size() < 2)
            throw DataError(std::string("interpolate_missing: channel ") +
                            kChannelNames[c] + " has fewer than 2 valid values");

        for (std::size_t i = 0; i < valid.front(); ++i) {
            vals[i] = vals[valid.front()];
            ++report.filled[c];
        }
        for (std::size_t i = valid.back() + 1; i < n; ++i) {
            vals[i] = vals[valid.back()];
            ++report.filled[c];
        }
        for (std::size_t k = 0; k + 1 < valid.size(); ++k) {
            const std::size_t a = valid[k], b = valid[k + 1];
            if (b == a + 1) continue;
            const double ta = out.timestamps[a], tb = out.timestamps[b];
            const double va = vals[a], vb = vals[b];
            for (std::size_t i = a + 1; i < b; ++i) {
                const double w = (out.timestamps[i] - ta) / (tb - ta);
                vals[i] = va + (vb - va) * w;
                ++report.filled[c];
            }
        }
    }
    return {std::move(out), report};
}

struct ChannelStats {
    double mean = 0.0;
    double stddev = 1.0;
    bool degenerate = false;  // zero-variance channel; std substituted with 1
};

struct NormStats {
    std::array<ChannelStats, kNumChannels> per_channel;

    const ChannelStats& channel(Channel c) const { return per_channel[static_cast<int>(c)]; }
    ChannelStats& channel(Channel c) { return per_channel[static_cast<int>(c)]; }
};

/// Fit z-score statistics (population std) over rows [begin, end).
inline NormStats fit_norm_stats(const Trace& trace, std::size_t begin, std::size_t end) {
    if (end > trace.size()) end = trace.size();
    if (begin + 2 > end) throw DataError("fit_norm_stats: need at least 2 rows");
    NormStats stats;
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        const auto& vals = trace.channels[c];
        double sum = 0.0;
        for (std::size_t i = begin; i < end; ++i) sum += vals[i];
        const double n = static_cast<double>(end - begin);
        const double mean = sum / n;
        double ss = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            const double d = vals[i] - mean;
            ss += d * d;
        }
        double sd = std::sqrt(ss / n);
        bool degenerate = !(sd > 0.0);
        if (degenerate) sd = 1.0;
        stats.per_channel[c] = {mean, sd, degenerate};
    }
    return stats;
}

inline NormStats fit_norm_stats(const Trace& trace) { return fit_norm_stats(trace, 0, trace.size()); }

inline Trace normalize(const Trace& trace, const NormStats& stats) {
    Trace out = trace;
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        const auto& s = stats.per_channel[c];
        if (!(s.stddev > 0.0)) throw DataError("normalize: non-positive std");
        for (auto& v : out.channels[c]) v = (v - s.mean) / s.stddev;
    }
    return out;
}

inline std::pair<Trace, NormStats> normalize_fit(const Trace& trace) {
    NormStats stats = fit_norm_stats(trace);
    return {normalize(trace, stats), stats};
}

inline double normalize_value(double raw, const NormStats& stats, Channel c) {
    const auto& s = stats.channel(c);
    return (raw - s.mean) / s.stddev;
}

inline double denormalize(double value, const NormStats& stats, Channel c) {
    const auto& s = stats.channel(c);
    return value * s.stddev + s.mean;
}

inline void save_norm_stats(const std::string& path, const NormStats& stats) {
    CsvWriter w(path);
    w.row({"channel", "mean", "std"});
    for (std::size_t c = 0; c < kNumChannels; ++c)
        w.row({kChannelNames[c], format_double17(stats.per_channel[c].mean),
               format_double17(stats.per_channel[c].stddev)});
}

inline NormStats load_norm_stats(const std::string& path) {
    CsvTable table = read_csv(path);
    const int cc = table.column("channel"), cm = table.column("mean"), cs = table.column("std");
    if (cc < 0 || cm < 0 || cs < 0) throw DataError("malformed stats file: " + path);
    NormStats stats;
    for (const auto& row : table.rows) {
        Channel ch = channel_from_name(row[static_cast<std::size_t>(cc)]);
        ChannelStats s;
        if (!parse_double(row[static_cast<std::size_t>(cm)], s.mean) ||
            !parse_double(row[static_cast<std::size_t>(cs)], s.stddev))
            throw DataError("malformed stats file: " + path);
        stats.channel(ch) = s;
    }
    return stats;
}

}  // namespace grad
