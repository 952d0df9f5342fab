// Labeled synthetic fault injection. Four injection kinds (instant spike,
// stuck-at constant, additive bias, linear drift) are scheduled over a
// clean normalized trace to hit target per-category anomaly rates, with
// ground-truth detection / bias-type / time-type labels per point.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "grad/csv.hpp"
#include "grad/rng.hpp"
#include "grad/trace.hpp"
#include "grad/util.hpp"

namespace grad {

enum class AnomalyKind : int { instant, constant, bias, drift };
enum class BiasType : int { none = 0, noise = 1, jump = 2 };
enum class TimeType : int { none = 0, transient = 1, intermittent = 2, permanent = 3 };

inline const char* to_string(AnomalyKind k) {
    switch (k) {
        case AnomalyKind::instant: return "instant";
        case AnomalyKind::constant: return "constant";
        case AnomalyKind::bias: return "bias";
        case AnomalyKind::drift: return "drift";
    }
    return "?";
}

inline const char* to_string(BiasType b) {
    switch (b) {
        case BiasType::none: return "none";
        case BiasType::noise: return "noise";
        case BiasType::jump: return "jump";
    }
    return "?";
}

inline const char* to_string(TimeType t) {
    switch (t) {
        case TimeType::none: return "none";
        case TimeType::transient: return "transient";
        case TimeType::intermittent: return "intermittent";
        case TimeType::permanent: return "permanent";
    }
    return "?";
}

inline BiasType bias_type_from_string(std::string_view s) {
    if (s == "none") return BiasType::none;
    if (s == "noise") return BiasType::noise;
    if (s == "jump") return BiasType::jump;
    throw DataError("unknown bias type: " + std::string(s));
}

inline TimeType time_type_from_string(std::string_view s) {
    if (s == "none") return TimeType::none;
    if (s == "transient") return TimeType::transient;
    if (s == "intermittent") return TimeType::intermittent;
    if (s == "permanent") return TimeType::permanent;
    throw DataError("unknown time type: " + std::string(s));
}

struct InjectionSpec {
    AnomalyKind kind = AnomalyKind::instant;
    double magnitude = 1.0;  // gaussian scale k / uniform bound u / linspace endpoint e
    int duration = 1;        // window length in time steps
    Channel channel = Channel::latitude;

    void validate() const {
        if (!(magnitude > 0.0)) throw DataError("injection magnitude must be positive");
        if (duration < 1) throw DataError("injection duration must be >= 1");
        if (kind == AnomalyKind::instant && duration != 1)
            throw DataError("instant injection requires duration 1");
        if (kind != AnomalyKind::instant && duration == 1 && kind == AnomalyKind::drift)
            throw DataError("drift injection requires duration >= 2");
        if (kind == AnomalyKind::drift && duration < 2)
            throw DataError("drift injection requires duration >= 2");
    }
};

struct AnomalyLabel {
    bool anomaly = false;
    BiasType bias = BiasType::none;
    TimeType time = TimeType::none;

    bool operator==(const AnomalyLabel&) const = default;
};

struct LabeledChannel {
    std::vector<double> clean;
    std::vector<double> corrupted;
    std::vector<AnomalyLabel> labels;
};

struct LabeledSeries {
    std::vector<double> timestamps;
    std::array<LabeledChannel, kNumChannels> channels;
    std::vector<Channel> injected_channels;
    std::uint64_t seed = 0;

    std::size_t size() const { return timestamps.size(); }
    LabeledChannel& channel(Channel c) { return channels[static_cast<int>(c)]; }
    const LabeledChannel& channel(Channel c) const { return channels[static_cast<int>(c)]; }
};

namespace detail {

inline constexpr double kMinOffset = 1e-9;
inline constexpr int kMaxRedraws = 64;

// Positive draw with the spec's resample rule: a draw below the offset
// floor is resampled once, then the whole episode offset is re-drawn.
template <typename DrawFn>
double draw_offset(Rng& rng, DrawFn&& draw) {
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        double v = draw(rng);
        if (std::abs(v) >= kMinOffset) return v;
        v = draw(rng);  // single resample
        if (std::abs(v) >= kMinOffset) return v;
    }
    throw StageError("injection offset persistently below floor; magnitude too small");
}

inline void mark(LabeledChannel& ch, std::size_t i, BiasType bias, TimeType tt) {
    ch.labels[i] = {true, bias, tt};
}

}  // namespace detail

/// Point spike: value[at] += k * n with n ~ N(0, 0.01), i.e. offset std k*0.1.
inline void inject_instant(LabeledChannel& ch, double scale, std::size_t at, TimeType tt,
                           Rng& rng) {
    InjectionSpec{AnomalyKind::instant, scale, 1, Channel::latitude}.validate();
    if (at >= ch.corrupted.size()) throw DataError("inject_instant: index out of range");
    const double offset =
        detail::draw_offset(rng, [&](Rng& r) { return scale * r.gaussian(0.0, 0.1); });
    ch.corrupted[at] = ch.clean[at] + offset;
    detail::mark(ch, at, BiasType::noise, tt);
}

/// Stuck-at fault: the whole window reads (clean[at-1] + c), c ~ U(0, u).
inline void inject_constant(LabeledChannel& ch, double bound, std::size_t at, int duration,
                            TimeType tt, Rng& rng) {
    InjectionSpec{AnomalyKind::constant, bound, duration, Channel::latitude}.validate();
    if (at == 0) throw DataError("inject_constant: no preceding value at index 0");
    if (at + static_cast<std::size_t>(duration) > ch.corrupted.size())
        throw DataError("inject_constant: window out of range");

    for (int redraw = 0; redraw < detail::kMaxRedraws; ++redraw) {
        const double c = detail::draw_offset(rng, [&](Rng& r) { return r.uniform(0.0, bound); });
        const double held = ch.clean[at - 1] + c;
        bool sound = true;
        for (int j = 0; j < duration; ++j)
            if (held == ch.clean[at + static_cast<std::size_t>(j)]) sound = false;
        if (!sound) continue;  // coincidental equality with the clean value; re-draw
        for (int j = 0; j < duration; ++j) {
            ch.corrupted[at + static_cast<std::size_t>(j)] = held;
            detail::mark(ch, at + static_cast<std::size_t>(j), BiasType::jump, tt);
        }
        return;
    }
    throw StageError("inject_constant: could not draw a sound offset");
}

/// Shape-preserving shift: corrupted[i] = clean[i] + c over the window.
inline void inject_bias(LabeledChannel& ch, double bound, std::size_t at, int duration,
                        TimeType tt, Rng& rng) {
    InjectionSpec{AnomalyKind::bias, bound, duration, Channel::latitude}.validate();
    if (at + static_cast<std::size_t>(duration) > ch.corrupted.size())
        throw DataError("inject_bias: window out of range");

    for (int redraw = 0; redraw < detail::kMaxRedraws; ++redraw) {
        const double c = detail::draw_offset(rng, [&](Rng& r) { return r.uniform(0.0, bound); });
        bool sound = true;
        for (int j = 0; j < duration; ++j) {
            const std::size_t i = at + static_cast<std::size_t>(j);
            if (ch.clean[i] + c == ch.clean[i]) sound = false;
        }
        if (!sound) continue;
        for (int j = 0; j < duration; ++j) {
            const std::size_t i = at + static_cast<std::size_t>(j);
            ch.corrupted[i] = ch.clean[i] + c;
            detail::mark(ch, i, BiasType::jump, tt);
        }
        return;
    }
    throw StageError("inject_bias: could not draw a sound offset");
}

/// Linear ramp: offsets e*j/(d-1) for j = 0..d-1. The j = 0 offset is
/// exactly zero, so that point stays labeled normal.
inline void inject_drift(LabeledChannel& ch, double endpoint, std::size_t at, int duration,
                         TimeType tt) {
    InjectionSpec{AnomalyKind::drift, endpoint, duration, Channel::latitude}.validate();
    if (at + static_cast<std::size_t>(duration) > ch.corrupted.size())
        throw DataError("inject_drift: window out of range");

    for (int j = 1; j < duration; ++j) {
        const std::size_t i = at + static_cast<std::size_t>(j);
        const double offset = endpoint * static_cast<double>(j) / static_cast<double>(duration - 1);
        if (ch.clean[i] + offset == ch.clean[i])
            throw StageError("inject_drift: offset vanished against the clean value");
        ch.corrupted[i] = ch.clean[i] + offset;
        detail::mark(ch, i, BiasType::jump, tt);
    }
}

// ---------------------------------------------------------------------------
// Scheduling
// ---------------------------------------------------------------------------

/// Target anomaly-point fractions per (time type x bias type), per channel.
struct CellRates {
    double transient_noise = 0.0, transient_jump = 0.0;
    double intermittent_noise = 0.0, intermittent_jump = 0.0;
    double permanent_noise = 0.0, permanent_jump = 0.0;

    double total() const {
        return transient_noise + transient_jump + intermittent_noise + intermittent_jump +
               permanent_noise + permanent_jump;
    }
    double& cell(TimeType tt, BiasType bt) {
        static double zero;
        switch (tt) {
            case TimeType::transient:
                return bt == BiasType::noise ? transient_noise : transient_jump;
            case TimeType::intermittent:
                return bt == BiasType::noise ? intermittent_noise : intermittent_jump;
            case TimeType::permanent:
                return bt == BiasType::noise ? permanent_noise : permanent_jump;
            default: zero = 0.0; return zero;
        }
    }
    double cell(TimeType tt, BiasType bt) const { return const_cast<CellRates*>(this)->cell(tt, bt); }
};

struct ChannelRates {
    Channel channel = Channel::latitude;
    CellRates rates;
};

struct MagnitudeConfig {
    double instant_scale = 25.0;  // k in k*N(0, 0.01)
    double jump_bound = 5.0;      // u in U(0, u) for constant and bias
    double drift_endpoint = 4.0;  // e in the linspace ramp
    bool allow_drift = true;
};

struct SchedulePlan {
    std::vector<ChannelRates> channels;
    MagnitudeConfig magnitudes;
    int min_gap = 8;
    int transient_max = 2;
    int intermittent_min_episodes = 3;
    int horizon = 50;
    int permanent_min = 20;
    int permanent_max = 40;
    int group_size_max = 5;
    int intra_gap_min = 3;
    int intra_gap_max = 8;

    void validate(std::size_t n) const {
        for (const auto& ch : channels) {
            const double total = ch.rates.total();
            if (total > 0.5)
                throw DataError("schedule plan: per-channel anomaly rate above 0.5");
            for (TimeType tt : {TimeType::transient, TimeType::intermittent, TimeType::permanent})
                for (BiasType bt : {BiasType::noise, BiasType::jump})
                    if (ch.rates.cell(tt, bt) < 0.0)
                        throw DataError("schedule plan: negative rate");
        }
        if (permanent_min < 2 || permanent_max < permanent_min)
            throw DataError("schedule plan: bad permanent run range");
        if (transient_max < 1 || intermittent_min_episodes < 2 || horizon < 2 || min_gap < 1)
            throw DataError("schedule plan: bad thresholds");
        if (n < static_cast<std::size_t>(permanent_min) * 2)
            throw DataError("schedule plan: series too short for permanent runs");
    }
};

struct PlannedInjection {
    InjectionSpec spec;
    std::size_t at = 0;
    TimeType time_type = TimeType::none;

    /// Indices of the points this injection labels anomalous.
    std::size_t label_begin() const {
        return spec.kind == AnomalyKind::drift ? at + 1 : at;
    }
    std::size_t label_end() const { return at + static_cast<std::size_t>(spec.duration); }
};

namespace detail {

struct Episode {
    AnomalyKind kind;
    int duration;  // window length; drift windows carry points+1
    int points;    // labeled anomaly points
};

struct Unit {
    TimeType time_type;
    BiasType bias_type;
    std::vector<Episode> episodes;
    std::vector<int> intra_gaps;  // between consecutive episodes
    int span() const {
        int s = 0;
        for (const auto& e : episodes) s += e.duration;
        for (int g : intra_gaps) s += g;
        return s;
    }
};

inline AnomalyKind pick_jump_kind(Rng& rng, int points, const SchedulePlan& plan) {
    const bool drift_ok = plan.magnitudes.allow_drift && points >= 10;
    const std::size_t n_kinds = drift_ok ? 3 : 2;
    switch (rng.index(n_kinds)) {
        case 0: return AnomalyKind::constant;
        case 1: return AnomalyKind::bias;
        default: return AnomalyKind::drift;
    }
}

inline Episode make_episode(AnomalyKind kind, int points) {
    if (kind == AnomalyKind::drift) return {kind, points + 1, points};
    return {kind, points, points};
}

// Units for one (time type, bias type) budget of anomaly points.
inline void build_units(std::vector<Unit>& units, TimeType tt, BiasType bt, long long budget,
                        const SchedulePlan& plan, Rng& rng) {
    if (budget <= 0) return;
    long long rem = budget;

    if (tt == TimeType::permanent) {
        while (rem > 0) {
            long long len;
            if (rem < plan.permanent_min) {
                if (2 * rem < plan.permanent_min) break;  // drop a tiny remainder
                len = plan.permanent_min;                 // bounded overshoot instead
            } else if (rem <= plan.permanent_max) {
                len = rem;  // final run absorbs the remainder
            } else {
                len = rng.int_range(plan.permanent_min, plan.permanent_max);
                if (rem - len < plan.permanent_min)
                    len = std::max<long long>(plan.permanent_min, rem - plan.permanent_min);
            }
            Unit u{tt, bt, {}, {}};
            if (bt == BiasType::noise) {
                // Sustained noisy segment: one instant per step.
                for (long long j = 0; j < len; ++j) {
                    u.episodes.push_back({AnomalyKind::instant, 1, 1});
                    if (j + 1 < len) u.intra_gaps.push_back(0);
                }
            } else {
                u.episodes.push_back(
                    make_episode(pick_jump_kind(rng, static_cast<int>(len), plan),
                                 static_cast<int>(len)));
            }
            units.push_back(std::move(u));
            rem -= len;
        }
        return;
    }

    if (tt == TimeType::intermittent) {
        std::size_t last_group = units.size();  // sentinel: no group yet
        while (rem > 0) {
            if (rem < plan.intermittent_min_episodes && last_group < units.size()) {
                // Attach the leftover to the previous group as one more episode.
                Unit& g = units[last_group];
                g.intra_gaps.push_back(rng.int_range(plan.intra_gap_min, plan.intra_gap_max));
                if (bt == BiasType::noise) {
                    for (long long j = 0; j < rem; ++j) {
                        g.episodes.push_back({AnomalyKind::instant, 1, 1});
                        if (j + 1 < rem) g.intra_gaps.push_back(0);
                    }
                } else {
                    g.episodes.push_back(make_episode(AnomalyKind::bias, static_cast<int>(rem)));
                }
                rem = 0;
                break;
            }
            Unit u{tt, bt, {}, {}};
            const int target_eps = static_cast<int>(
                rng.int_range(plan.intermittent_min_episodes, plan.group_size_max));
            int placed = 0;
            while (placed < target_eps && rem > 0) {
                int len = static_cast<int>(rng.int_range(1, plan.transient_max));
                len = static_cast<int>(std::min<long long>(len, rem));
                // Keep the whole group inside the recurrence horizon.
                const int gap = placed ? static_cast<int>(rng.int_range(plan.intra_gap_min,
                                                                        plan.intra_gap_max))
                                       : 0;
                if (placed && u.span() + gap + len > plan.horizon - 2) break;
                if (placed) u.intra_gaps.push_back(gap);
                if (bt == BiasType::noise) {
                    for (int j = 0; j < len; ++j) {
                        u.episodes.push_back({AnomalyKind::instant, 1, 1});
                        if (j + 1 < len) u.intra_gaps.push_back(0);
                    }
                } else {
                    u.episodes.push_back(make_episode(AnomalyKind::bias, len));
                }
                rem -= len;
                ++placed;
            }
            units.push_back(std::move(u));
            last_group = units.size() - 1;
        }
        return;
    }

    // Transient: isolated short episodes.
    while (rem > 0) {
        int len = bt == BiasType::noise
                      ? 1
                      : static_cast<int>(rng.int_range(1, plan.transient_max));
        len = static_cast<int>(std::min<long long>(len, rem));
        Unit u{tt, bt, {}, {}};
        if (bt == BiasType::noise) {
            u.episodes.push_back({AnomalyKind::instant, 1, 1});
        } else {
            const AnomalyKind kind = rng.index(2) == 0 ? AnomalyKind::constant : AnomalyKind::bias;
            u.episodes.push_back(make_episode(kind, len));
        }
        units.push_back(std::move(u));
        rem -= len;
    }
}

inline int unit_isolation(const Unit& u, const SchedulePlan& plan) {
    // Permanent runs get a full recurrence-horizon buffer; groups keep half
    // a horizon so neighbouring transients do not read as part of the group.
    switch (u.time_type) {
        case TimeType::permanent: return plan.horizon + 1;
        case TimeType::intermittent: return plan.horizon / 2 + 1;
        default: return plan.min_gap;
    }
}

}  // namespace detail

/// Lay out non-overlapping injection episodes hitting the plan's
/// per-category anomaly-point budgets over a series of length n.
inline std::vector<PlannedInjection> plan_schedule(std::size_t n, const SchedulePlan& plan,
                                                   Rng& rng) {
    plan.validate(n);
    std::vector<PlannedInjection> schedule;

    for (const auto& ch : plan.channels) {
        Rng ch_rng = rng.child(0x100 + static_cast<std::uint64_t>(ch.channel));

        std::vector<detail::Unit> units;
        for (TimeType tt : {TimeType::permanent, TimeType::intermittent, TimeType::transient})
            for (BiasType bt : {BiasType::noise, BiasType::jump}) {
                const long long budget =
                    std::llround(ch.rates.cell(tt, bt) * static_cast<double>(n));
                detail::build_units(units, tt, bt, budget, plan, ch_rng);
            }
        if (units.empty()) continue;
        ch_rng.shuffle(units);

        // Required footprint: spans plus inter-unit isolation gaps.
        const std::size_t start0 = std::max<std::size_t>(1, static_cast<std::size_t>(plan.min_gap));
        long long required = static_cast<long long>(start0);
        for (std::size_t i = 0; i < units.size(); ++i) {
            required += units[i].span();
            const int trail = detail::unit_isolation(units[i], plan);
            const int lead =
                i + 1 < units.size() ? detail::unit_isolation(units[i + 1], plan) : 0;
            required += std::max(trail, lead);
        }
        if (required > static_cast<long long>(n))
            throw DataError("plan_schedule: infeasible rates for series length " +
                            std::to_string(n));

        long long slack = static_cast<long long>(n) - required;
        std::size_t cursor = start0;
        for (std::size_t i = 0; i < units.size(); ++i) {
            const long long units_left = static_cast<long long>(units.size() - i);
            const long long max_extra = 2 * slack / units_left + 1;
            const long long extra =
                std::min<long long>(slack, static_cast<long long>(ch_rng.index(
                                               static_cast<std::size_t>(max_extra))));
            slack -= extra;
            cursor += static_cast<std::size_t>(extra);

            const detail::Unit& u = units[i];
            std::size_t pos = cursor;
            for (std::size_t e = 0; e < u.episodes.size(); ++e) {
                const auto& ep = u.episodes[e];
                InjectionSpec spec;
                spec.kind = ep.kind;
                spec.duration = ep.duration;
                spec.channel = ch.channel;
                switch (ep.kind) {
                    case AnomalyKind::instant: spec.magnitude = plan.magnitudes.instant_scale; break;
                    case AnomalyKind::constant:
                    case AnomalyKind::bias: spec.magnitude = plan.magnitudes.jump_bound; break;
                    case AnomalyKind::drift: spec.magnitude = plan.magnitudes.drift_endpoint; break;
                }
                schedule.push_back({spec, pos, u.time_type});
                pos += static_cast<std::size_t>(ep.duration);
                if (e < u.intra_gaps.size()) pos += static_cast<std::size_t>(u.intra_gaps[e]);
            }
            cursor += static_cast<std::size_t>(u.span());
            const int trail = detail::unit_isolation(u, plan);
            const int lead =
                i + 1 < units.size() ? detail::unit_isolation(units[i + 1], plan) : 0;
            cursor += static_cast<std::size_t>(std::max(trail, lead));
        }
    }
    return schedule;
}

/// Corrupt a preprocessed (normalized) trace per the plan. Deterministic
/// for a fixed seed, byte for byte.
inline LabeledSeries build_labeled_dataset(const Trace& trace, const SchedulePlan& plan,
                                           std::uint64_t seed) {
    LabeledSeries out;
    out.timestamps = trace.timestamps;
    out.seed = seed;
    const std::size_t n = trace.size();
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        out.channels[c].clean = trace.channels[c];
        out.channels[c].corrupted = trace.channels[c];
        out.channels[c].labels.assign(n, AnomalyLabel{});
    }
    for (const auto& ch : plan.channels) out.injected_channels.push_back(ch.channel);

    Rng root(seed);
    Rng schedule_rng = root.child(1);
    Rng inject_rng = root.child(2);

    const auto schedule = plan_schedule(n, plan, schedule_rng);
    for (const auto& pi : schedule) {
        LabeledChannel& ch = out.channel(pi.spec.channel);
        switch (pi.spec.kind) {
            case AnomalyKind::instant:
                inject_instant(ch, pi.spec.magnitude, pi.at, pi.time_type, inject_rng);
                break;
            case AnomalyKind::constant:
                inject_constant(ch, pi.spec.magnitude, pi.at, pi.spec.duration, pi.time_type,
                                inject_rng);
                break;
            case AnomalyKind::bias:
                inject_bias(ch, pi.spec.magnitude, pi.at, pi.spec.duration, pi.time_type,
                            inject_rng);
                break;
            case AnomalyKind::drift:
                inject_drift(ch, pi.spec.magnitude, pi.at, pi.spec.duration, pi.time_type);
                break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Table-style rate presets (per-channel fractions)
// ---------------------------------------------------------------------------

namespace detail {

inline CellRates make_cell_rates(double ch_transient, double ch_intermittent, double ch_permanent,
                                 double noise_share_t, double noise_share_i,
                                 double noise_share_p) {
    CellRates r;
    r.transient_noise = ch_transient * noise_share_t;
    r.transient_jump = ch_transient * (1.0 - noise_share_t);
    r.intermittent_noise = ch_intermittent * noise_share_i;
    r.intermittent_jump = ch_intermittent * (1.0 - noise_share_i);
    r.permanent_noise = ch_permanent * noise_share_p;
    r.permanent_jump = ch_permanent * (1.0 - noise_share_p);
    return r;
}

}  // namespace detail

/// Arterial-corridor anomaly-rate profile: ~10.2% of latitude points and
/// ~10.1% of longitude points anomalous, noise:jump roughly 60:40.
inline SchedulePlan mmitss_plan() {
    SchedulePlan plan;
    const double st = 4.38 / (4.38 + 2.92);
    const double si = 3.92 / (3.92 + 2.63);
    const double sp = 3.81 / (3.81 + 2.64);
    plan.channels.push_back(
        {Channel::latitude, detail::make_cell_rates(0.0368, 0.0327, 0.0324, st, si, sp)});
    plan.channels.push_back(
        {Channel::longitude, detail::make_cell_rates(0.0362, 0.0328, 0.0321, st, si, sp)});
    return plan;
}

/// Urban-aerial anomaly-rate profile (~10.4% / ~10.0%).
inline SchedulePlan zurich_plan() {
    SchedulePlan plan;
    const double st = 4.34 / (4.34 + 2.96);
    const double si = 3.89 / (3.89 + 2.62);
    const double sp = 4.00 / (4.00 + 2.64);
    plan.channels.push_back(
        {Channel::latitude, detail::make_cell_rates(0.0381, 0.0318, 0.0342, st, si, sp)});
    plan.channels.push_back(
        {Channel::longitude, detail::make_cell_rates(0.0348, 0.0333, 0.0322, st, si, sp)});
    return plan;
}

/// Single-kind plan used by injection sweeps: isolated instants at `rate`.
inline SchedulePlan instant_only_plan(double rate, double scale,
                                      std::vector<Channel> channels = {Channel::latitude,
                                                                       Channel::longitude}) {
    SchedulePlan plan;
    plan.magnitudes.instant_scale = scale;
    for (Channel c : channels) {
        CellRates r;
        r.transient_noise = rate;
        plan.channels.push_back({c, r});
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Labeled dataset CSV round-trip
// ---------------------------------------------------------------------------

inline void write_labeled_csv(const std::string& path, const LabeledSeries& series) {
    CsvWriter w(path);
    std::vector<std::string> header = {"timestamp"};
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        const std::string ch = kChannelNames[c];
        header.push_back(ch + "_clean");
        header.push_back(ch + "_corrupt");
        header.push_back(ch + "_detect");
        header.push_back(ch + "_bias");
        header.push_back(ch + "_time");
    }
    w.row(header);
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::vector<std::string> row = {format_double(series.timestamps[i])};
        for (std::size_t c = 0; c < kNumChannels; ++c) {
            const auto& ch = series.channels[c];
            row.push_back(format_double(ch.clean[i]));
            row.push_back(format_double(ch.corrupted[i]));
            row.push_back(ch.labels[i].anomaly ? "1" : "0");
            row.push_back(to_string(ch.labels[i].bias));
            row.push_back(to_string(ch.labels[i].time));
        }
        w.row(row);
    }
}

inline LabeledSeries read_labeled_csv(const std::string& path) {
    CsvTable table = read_csv(path);
    LabeledSeries series;
    const int ct = table.column("timestamp");
    if (ct < 0) throw DataError("labeled csv missing timestamp column: " + path);

    struct Cols {
        int clean, corrupt, detect, bias, time;
    };
    std::array<Cols, kNumChannels> cols{};
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        const std::string ch = kChannelNames[c];
        cols[c] = {table.column(ch + "_clean"), table.column(ch + "_corrupt"),
                   table.column(ch + "_detect"), table.column(ch + "_bias"),
                   table.column(ch + "_time")};
        if (cols[c].clean < 0 || cols[c].corrupt < 0 || cols[c].detect < 0 || cols[c].bias < 0 ||
            cols[c].time < 0)
            throw DataError("labeled csv missing columns for channel " + ch);
    }

    for (const auto& row : table.rows) {
        double t;
        if (!parse_double(row[static_cast<std::size_t>(ct)], t))
            throw DataError("labeled csv: malformed timestamp");
        series.timestamps.push_back(t);
        for (std::size_t c = 0; c < kNumChannels; ++c) {
            auto& ch = series.channels[c];
            double clean, corrupt;
            if (!parse_double(row[static_cast<std::size_t>(cols[c].clean)], clean) ||
                !parse_double(row[static_cast<std::size_t>(cols[c].corrupt)], corrupt))
                throw DataError("labeled csv: malformed value");
            ch.clean.push_back(clean);
            ch.corrupted.push_back(corrupt);
            AnomalyLabel label;
            label.anomaly = row[static_cast<std::size_t>(cols[c].detect)] == "1";
            label.bias = bias_type_from_string(row[static_cast<std::size_t>(cols[c].bias)]);
            label.time = time_type_from_string(row[static_cast<std::size_t>(cols[c].time)]);
            ch.labels.push_back(label);
        }
    }
    for (std::size_t c = 0; c < kNumChannels; ++c) {
        const auto& ch = series.channels[c];
        for (std::size_t i = 0; i < ch.labels.size(); ++i)
            if (ch.labels[i].anomaly) {
                series.injected_channels.push_back(static_cast<Channel>(c));
                break;
            }
    }
    return series;
}

}  // namespace grad
