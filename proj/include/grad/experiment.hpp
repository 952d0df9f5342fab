// Experiment orchestration: a JSON manifest describes dataset, injection
// plan, REMA tuning, feature windows and training; run_experiment executes
// the stages and writes a reproducible report bundle (report.csv,
// manifest.resolved, hashes.txt, plot-ready CSVs). Reruns with the same
// manifest reproduce report.csv byte for byte; wall-clock goes to a
// separate timings file.
#pragma once

#include <chrono>
#include <filesystem>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "grad/csv.hpp"
#include "grad/inject.hpp"
#include "grad/model_io.hpp"
#include "grad/pipeline.hpp"
#include "grad/synth.hpp"
#include "grad/util.hpp"

namespace grad {

struct Manifest {
    int schema_version = 1;
    std::string name = "experiment";
    std::uint64_t seed = 42;

    // dataset
    std::string dataset_kind = "synthetic";  // synthetic | csv
    std::string dataset_preset = "mmitss";   // mmitss | zurich
    std::size_t dataset_length = 50000;
    std::string dataset_path;
    ColumnMapping columns;

    // injection plan
    std::string plan_preset = "mmitss";  // mmitss | zurich | instant
    double instant_rate = 0.10;
    MagnitudeConfig magnitudes;

    // split
    double train_frac = 0.6;
    double val_frac = 0.2;

    // rema tuning
    std::string rema_mode = "grid";  // grid | fixed
    RemaGrid grid;
    RemaParams fixed_rema;

    // features
    WindowConfig windows;

    // training
    TrainConfig train;
    std::vector<std::uint64_t> train_seeds = {1, 2, 3};

    // time classifier
    TimeClassifierConfig time_cfg;

    // optional sweep over instant magnitudes (Table-4 style)
    std::vector<double> sweep_instant_scales;
};

namespace detail {

inline nlohmann::json manifest_to_json(const Manifest& m) {
    nlohmann::json j;
    j["schema_version"] = m.schema_version;
    j["name"] = m.name;
    j["seed"] = m.seed;
    j["dataset"] = {{"kind", m.dataset_kind},
                    {"preset", m.dataset_preset},
                    {"length", m.dataset_length},
                    {"path", m.dataset_path},
                    {"columns",
                     {{"timestamp", m.columns.timestamp},
                      {"latitude", m.columns.latitude},
                      {"longitude", m.columns.longitude},
                      {"speed", m.columns.speed}}}};
    j["plan"] = {{"preset", m.plan_preset},
                 {"instant_rate", m.instant_rate},
                 {"magnitudes",
                  {{"instant_scale", m.magnitudes.instant_scale},
                   {"jump_bound", m.magnitudes.jump_bound},
                   {"drift_endpoint", m.magnitudes.drift_endpoint},
                   {"allow_drift", m.magnitudes.allow_drift}}}};
    j["split"] = {{"train", m.train_frac}, {"val", m.val_frac}};
    j["rema"] = {{"mode", m.rema_mode},
                 {"grid",
                  {{"alpha", m.grid.alpha},
                   {"alpha_min", m.grid.alpha_min},
                   {"alpha_max", m.grid.alpha_max},
                   {"punish", m.grid.punish},
                   {"reward", m.grid.reward},
                   {"slide_size", m.grid.slide_size},
                   {"sensitivity", m.grid.sensitivity}}},
                 {"params",
                  {{"alpha", m.fixed_rema.alpha},
                   {"alpha_min", m.fixed_rema.alpha_min},
                   {"alpha_max", m.fixed_rema.alpha_max},
                   {"punish", m.fixed_rema.punish},
                   {"reward", m.fixed_rema.reward},
                   {"slide_size", m.fixed_rema.slide_size},
                   {"sensitivity", m.fixed_rema.sensitivity}}}};
    j["features"] = {{"regression_window", m.windows.regression_window},
                     {"stat_window", m.windows.stat_window},
                     {"rsi_window", m.windows.rsi_window}};
    j["train"] = {{"window", m.train.window},
                  {"learning_rate", m.train.learning_rate},
                  {"epochs", m.train.epochs},
                  {"batch_size", m.train.batch_size},
                  {"patience", m.train.patience},
                  {"class_weighting", m.train.class_weighting},
                  {"clip_norm", m.train.clip_norm},
                  {"hidden1", m.train.hidden1},
                  {"hidden2", m.train.hidden2},
                  {"seeds", m.train_seeds}};
    j["time_classifier"] = {{"transient_max", m.time_cfg.transient_max},
                            {"intermittent_min_episodes", m.time_cfg.intermittent_min_episodes},
                            {"horizon", m.time_cfg.horizon},
                            {"permanent_min", m.time_cfg.permanent_min}};
    if (!m.sweep_instant_scales.empty())
        j["sweep"] = {{"instant_scales", m.sweep_instant_scales}};
    return j;
}

inline Manifest manifest_from_json(const nlohmann::json& j) {
    Manifest m;
    m.schema_version = j.value("schema_version", 1);
    if (m.schema_version != 1) throw DataError("unsupported manifest schema_version");
    m.name = j.value("name", std::string("experiment"));
    m.seed = j.value("seed", std::uint64_t{42});
    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        m.dataset_kind = d.value("kind", m.dataset_kind);
        m.dataset_preset = d.value("preset", m.dataset_preset);
        m.dataset_length = d.value("length", m.dataset_length);
        m.dataset_path = d.value("path", m.dataset_path);
        if (d.contains("columns")) {
            const auto& c = d.at("columns");
            m.columns.timestamp = c.value("timestamp", m.columns.timestamp);
            m.columns.latitude = c.value("latitude", m.columns.latitude);
            m.columns.longitude = c.value("longitude", m.columns.longitude);
            m.columns.speed = c.value("speed", m.columns.speed);
        }
    }
    if (j.contains("plan")) {
        const auto& p = j.at("plan");
        m.plan_preset = p.value("preset", m.plan_preset);
        m.instant_rate = p.value("instant_rate", m.instant_rate);
        if (p.contains("magnitudes")) {
            const auto& g = p.at("magnitudes");
            m.magnitudes.instant_scale = g.value("instant_scale", m.magnitudes.instant_scale);
            m.magnitudes.jump_bound = g.value("jump_bound", m.magnitudes.jump_bound);
            m.magnitudes.drift_endpoint = g.value("drift_endpoint", m.magnitudes.drift_endpoint);
            m.magnitudes.allow_drift = g.value("allow_drift", m.magnitudes.allow_drift);
        }
    }
    if (j.contains("split")) {
        m.train_frac = j.at("split").value("train", m.train_frac);
        m.val_frac = j.at("split").value("val", m.val_frac);
    }
    if (j.contains("rema")) {
        const auto& r = j.at("rema");
        m.rema_mode = r.value("mode", m.rema_mode);
        if (r.contains("grid")) {
            const auto& g = r.at("grid");
            m.grid.alpha = g.value("alpha", m.grid.alpha);
            m.grid.alpha_min = g.value("alpha_min", m.grid.alpha_min);
            m.grid.alpha_max = g.value("alpha_max", m.grid.alpha_max);
            m.grid.punish = g.value("punish", m.grid.punish);
            m.grid.reward = g.value("reward", m.grid.reward);
            m.grid.slide_size = g.value("slide_size", m.grid.slide_size);
            m.grid.sensitivity = g.value("sensitivity", m.grid.sensitivity);
        }
        if (r.contains("params")) {
            const auto& p = r.at("params");
            m.fixed_rema.alpha = p.value("alpha", m.fixed_rema.alpha);
            m.fixed_rema.alpha_min = p.value("alpha_min", m.fixed_rema.alpha_min);
            m.fixed_rema.alpha_max = p.value("alpha_max", m.fixed_rema.alpha_max);
            m.fixed_rema.punish = p.value("punish", m.fixed_rema.punish);
            m.fixed_rema.reward = p.value("reward", m.fixed_rema.reward);
            m.fixed_rema.slide_size = p.value("slide_size", m.fixed_rema.slide_size);
            m.fixed_rema.sensitivity = p.value("sensitivity", m.fixed_rema.sensitivity);
        }
    }
    if (j.contains("features")) {
        const auto& f = j.at("features");
        m.windows.regression_window = f.value("regression_window", m.windows.regression_window);
        m.windows.stat_window = f.value("stat_window", m.windows.stat_window);
        m.windows.rsi_window = f.value("rsi_window", m.windows.stat_window);
    }
    if (j.contains("train")) {
        const auto& t = j.at("train");
        m.train.window = t.value("window", m.train.window);
        m.train.learning_rate = t.value("learning_rate", m.train.learning_rate);
        m.train.epochs = t.value("epochs", m.train.epochs);
        m.train.batch_size = t.value("batch_size", m.train.batch_size);
        m.train.patience = t.value("patience", m.train.patience);
        m.train.class_weighting = t.value("class_weighting", m.train.class_weighting);
        m.train.clip_norm = t.value("clip_norm", m.train.clip_norm);
        m.train.hidden1 = t.value("hidden1", m.train.hidden1);
        m.train.hidden2 = t.value("hidden2", m.train.hidden2);
        m.train_seeds = t.value("seeds", m.train_seeds);
    }
    if (j.contains("time_classifier")) {
        const auto& t = j.at("time_classifier");
        m.time_cfg.transient_max = t.value("transient_max", m.time_cfg.transient_max);
        m.time_cfg.intermittent_min_episodes =
            t.value("intermittent_min_episodes", m.time_cfg.intermittent_min_episodes);
        m.time_cfg.horizon = t.value("horizon", m.time_cfg.horizon);
        m.time_cfg.permanent_min = t.value("permanent_min", m.time_cfg.permanent_min);
    }
    if (j.contains("sweep"))
        m.sweep_instant_scales =
            j.at("sweep").value("instant_scales", std::vector<double>{});
    return m;
}

}  // namespace detail

inline Manifest load_manifest(const std::string& path) {
    return detail::manifest_from_json(nlohmann::json::parse(read_file_bytes(path)));
}

inline void save_manifest(const std::string& path, const Manifest& m) {
    write_file_bytes(path, detail::manifest_to_json(m).dump(2) + "\n");
}

inline SchedulePlan plan_from_manifest(const Manifest& m) {
    SchedulePlan plan;
    if (m.plan_preset == "mmitss") plan = mmitss_plan();
    else if (m.plan_preset == "zurich") plan = zurich_plan();
    else if (m.plan_preset == "instant") plan = instant_only_plan(m.instant_rate, 25.0);
    else throw DataError("unknown plan preset: " + m.plan_preset);
    plan.magnitudes = m.magnitudes;
    plan.transient_max = m.time_cfg.transient_max;
    plan.intermittent_min_episodes = m.time_cfg.intermittent_min_episodes;
    plan.horizon = m.time_cfg.horizon;
    plan.permanent_min = m.time_cfg.permanent_min;
    return plan;
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct ScenarioResult {
    std::string name;
    RemaParams rema;
    double grid_score = 0.0;
    std::vector<std::uint64_t> seeds;
    std::vector<EvalOutcome> per_seed;
    double mean_f1_anomaly = 0.0;
    double mean_f1_normal = 0.0;
    double mean_overall_f1 = 0.0;
};

struct ExperimentResult {
    std::vector<ScenarioResult> scenarios;
    std::vector<std::pair<std::string, double>> timings;  // stage, seconds
    std::string bundle_dir;
};

namespace detail {

class StageClock {
public:
    explicit StageClock(std::vector<std::pair<std::string, double>>& sink) : sink_(sink) {}
    template <typename F>
    auto run(const std::string& stage, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<decltype(f())>) {
                f();
                sink_.emplace_back(stage, elapsed(t0));
            } else {
                auto result = f();
                sink_.emplace_back(stage, elapsed(t0));
                return result;
            }
        } catch (const DataError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError("stage '" + stage + "' failed: " + e.what());
        }
    }

private:
    static double elapsed(std::chrono::steady_clock::time_point t0) {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    std::vector<std::pair<std::string, double>>& sink_;
};

inline std::string labeled_series_digest(const LabeledSeries& s) {
    Fnv1a64 h;
    auto feed = [&](double v) { h.update(&v, sizeof(v)); };
    for (double t : s.timestamps) feed(t);
    for (const auto& ch : s.channels) {
        for (double v : ch.clean) feed(v);
        for (double v : ch.corrupted) feed(v);
        for (const auto& l : ch.labels) {
            const int tag = (l.anomaly ? 100 : 0) + static_cast<int>(l.bias) * 10 +
                            static_cast<int>(l.time);
            h.update(&tag, sizeof(tag));
        }
    }
    return h.hex();
}

inline std::string trace_digest(const Trace& t) {
    Fnv1a64 h;
    for (double v : t.timestamps) h.update(&v, sizeof(v));
    for (const auto& ch : t.channels)
        for (double v : ch) h.update(&v, sizeof(v));
    return h.hex();
}

}  // namespace detail

/// Build (or load) the preprocessed + normalized trace for a manifest.
inline std::pair<Trace, NormStats> prepare_trace(const Manifest& m) {
    Trace raw;
    if (m.dataset_kind == "synthetic") {
        const SynthConfig cfg = m.dataset_preset == "zurich"
                                    ? zurich_like_config(m.dataset_length)
                                    : mmitss_like_config(m.dataset_length);
        raw = synth_trace(cfg, m.seed);
    } else if (m.dataset_kind == "csv") {
        raw = read_trace_csv(m.dataset_path, m.columns);
    } else {
        throw DataError("unknown dataset kind: " + m.dataset_kind);
    }
    raw = sort_merge(raw);
    raw = interpolate_missing(raw).first;
    const SplitBounds split = contiguous_split(raw.size(), m.train_frac, m.val_frac);
    const NormStats stats = fit_norm_stats(raw, 0, split.train_end);
    return {normalize(raw, stats), stats};
}

/// Run one scenario: inject -> tune -> features -> train (per seed) ->
/// predict -> score on the test block.
inline ScenarioResult run_scenario(const Manifest& m, const std::string& name,
                                   const SchedulePlan& plan, const Trace& normalized,
                                   std::vector<std::pair<std::string, double>>& timings,
                                   const std::string& plots_dir = {}) {
    detail::StageClock clock(timings);
    ScenarioResult result;
    result.name = name;
    result.seeds = m.train_seeds;

    const LabeledSeries labeled = clock.run(
        name + "/inject", [&] { return build_labeled_dataset(normalized, plan, m.seed); });
    const SplitBounds split = contiguous_split(labeled.size(), m.train_frac, m.val_frac);

    if (m.rema_mode == "grid") {
        const GridSearchResult gs = clock.run(name + "/tune-rema", [&] {
            return grid_search(labeled, m.grid, split.train_end);
        });
        result.rema = gs.best.params;
        result.grid_score = gs.best.score;
        if (!plots_dir.empty())
            save_grid_report(plots_dir + "/" + name + "_grid.csv", gs);
    } else {
        result.rema = m.fixed_rema;
    }

    const FeaturePack pack = clock.run(
        name + "/features", [&] { return compute_features(labeled, result.rema, m.windows); });

    const FeatureScaler scaler = fit_feature_scaler(pack, 0, split.train_end);
    const std::vector<Mat> scaled = scale_pack(pack, scaler);

    const SequenceDataset train_det = make_detection_dataset(pack, scaled, labeled, 0,
                                                             split.train_end, m.train.window);
    const SequenceDataset val_det = make_detection_dataset(
        pack, scaled, labeled, split.train_end, split.val_end, m.train.window);
    const SequenceDataset train_bias =
        make_bias_dataset(pack, scaled, labeled, 0, split.train_end, m.train.window);
    const SequenceDataset val_bias = make_bias_dataset(pack, scaled, labeled, split.train_end,
                                                       split.val_end, m.train.window);
    const bool bias_trainable =
        dataset_has_both_classes(train_bias) && dataset_has_both_classes(val_bias);

    clock.run(name + "/train+score", [&] {
        result.per_seed.resize(m.train_seeds.size());
        std::vector<std::thread> workers;
        for (std::size_t si = 0; si < m.train_seeds.size(); ++si) {
            workers.emplace_back([&, si] {
                TrainConfig cfg = m.train;
                cfg.seed = m.train_seeds[si];
                GruModel detector = train_gru(train_det, val_det, cfg);
                detector.scaler = scaler;

                GruModel bias_model;
                if (bias_trainable) {
                    TrainConfig bias_cfg = cfg;
                    bias_model = train_gru(train_bias, val_bias, bias_cfg);
                    bias_model.scaler = scaler;
                }
                result.per_seed[si] = evaluate_models(
                    pack, labeled, detector, bias_trainable ? &bias_model : nullptr, result.rema,
                    m.time_cfg, split.val_end, labeled.size());
                if (!plots_dir.empty())
                    write_training_log(plots_dir + "/" + name + "_seed" +
                                           std::to_string(m.train_seeds[si]) + "_training.csv",
                                       detector.meta);
            });
        }
        for (auto& w : workers) w.join();
    });

    for (const auto& e : result.per_seed) {
        result.mean_f1_anomaly += e.detection.anomaly.f1;
        result.mean_f1_normal += e.detection.normal.f1;
        result.mean_overall_f1 += e.detection.overall_f1();
    }
    const auto k = static_cast<double>(result.per_seed.size());
    result.mean_f1_anomaly /= k;
    result.mean_f1_normal /= k;
    result.mean_overall_f1 /= k;
    return result;
}

namespace detail {

inline void write_report_csv(const std::string& path, const ExperimentResult& result) {
    CsvWriter w(path);
    w.row({"scenario", "seed", "group", "label", "precision", "recall", "f1"});
    auto metrics_row = [&](const std::string& scen, const std::string& seed,
                           const std::string& group, const std::string& label,
                           const ClassMetrics& m) {
        w.row({scen, seed, group, label, format_double(m.precision), format_double(m.recall),
               format_double(m.f1)});
    };
    for (const auto& s : result.scenarios) {
        for (std::size_t si = 0; si < s.per_seed.size(); ++si) {
            const std::string seed = std::to_string(s.seeds[si]);
            const EvalOutcome& e = s.per_seed[si];
            metrics_row(s.name, seed, "detection", "normal", e.detection.normal);
            metrics_row(s.name, seed, "detection", "anomaly", e.detection.anomaly);
            w.row({s.name, seed, "detection", "overall_f1", "", "",
                   format_double(e.detection.overall_f1())});
            if (e.has_bias_score)
                for (std::size_t c = 0; c < e.bias.per_class.size(); ++c)
                    metrics_row(s.name, seed, "bias", e.bias.matrix.labels[c],
                                e.bias.per_class[c]);
            if (e.has_time_score)
                for (std::size_t c = 0; c < e.time.per_class.size(); ++c)
                    metrics_row(s.name, seed, "time", e.time.matrix.labels[c],
                                e.time.per_class[c]);
        }
        w.row({s.name, "mean", "detection", "f1_anomaly", "", "",
               format_double(s.mean_f1_anomaly)});
        w.row({s.name, "mean", "detection", "f1_normal", "", "",
               format_double(s.mean_f1_normal)});
        w.row({s.name, "mean", "detection", "overall_f1", "", "",
               format_double(s.mean_overall_f1)});
    }
}

}  // namespace detail

/// Execute a manifest and write the report bundle into out_dir.
inline ExperimentResult run_experiment(const Manifest& m, const std::string& out_dir) {
    namespace fs = std::filesystem;
    ExperimentResult result;
    result.bundle_dir = out_dir;
    fs::create_directories(out_dir);
    const std::string plots_dir = out_dir + "/plots";
    fs::create_directories(plots_dir);

    detail::StageClock clock(result.timings);
    std::string failed_stage;
    try {
        const auto [normalized, stats] =
            clock.run("dataset", [&] { return prepare_trace(m); });
        save_norm_stats(out_dir + "/norm_stats.csv", stats);

        std::vector<std::string> hash_lines;
        hash_lines.push_back("trace " + detail::trace_digest(normalized));

        if (m.sweep_instant_scales.empty()) {
            const SchedulePlan plan = plan_from_manifest(m);
            result.scenarios.push_back(
                run_scenario(m, "main", plan, normalized, result.timings, plots_dir));
        } else {
            for (double scale : m.sweep_instant_scales) {
                Manifest mm = m;
                mm.magnitudes.instant_scale = scale;
                mm.plan_preset = "instant";
                SchedulePlan plan = plan_from_manifest(mm);
                std::ostringstream name;
                name << "instant_" << scale;
                result.scenarios.push_back(
                    run_scenario(mm, name.str(), plan, normalized, result.timings, plots_dir));
            }
        }

        detail::write_report_csv(out_dir + "/report.csv", result);

        nlohmann::json resolved = detail::manifest_to_json(m);
        for (const auto& s : result.scenarios) {
            resolved["resolved"][s.name] = {
                {"rema",
                 {{"alpha", s.rema.alpha},
                  {"alpha_min", s.rema.alpha_min},
                  {"alpha_max", s.rema.alpha_max},
                  {"punish", s.rema.punish},
                  {"reward", s.rema.reward},
                  {"slide_size", s.rema.slide_size},
                  {"sensitivity", s.rema.sensitivity}}},
                {"grid_score", s.grid_score}};
        }
        write_file_bytes(out_dir + "/manifest.resolved", resolved.dump(2) + "\n");

        {
            Fnv1a64 h;
            h.update(detail::manifest_to_json(m).dump());
            hash_lines.push_back("manifest " + h.hex());
        }
        {
            Fnv1a64 h;
            h.update(read_file_bytes(out_dir + "/report.csv"));
            hash_lines.push_back("report " + h.hex());
        }
        std::string hashes;
        for (const auto& line : hash_lines) hashes += line + "\n";
        write_file_bytes(out_dir + "/hashes.txt", hashes);

        std::string timings;
        for (const auto& [stage, seconds] : result.timings)
            timings += stage + " " + format_double(seconds) + "\n";
        write_file_bytes(out_dir + "/timings.txt", timings);
        write_file_bytes(out_dir + "/status.txt", "ok\n");
    } catch (const std::exception& e) {
        write_file_bytes(out_dir + "/status.txt", std::string("failed: ") + e.what() + "\n");
        throw;
    }
    return result;
}

/// Train/evaluate at several feed-window sizes and benchmark the
/// per-point latency of the full pipeline at each size.
struct WindowStudyRow {
    std::size_t window = 0;
    double f1_anomaly = 0.0;
    double f1_normal = 0.0;
    double overall_f1 = 0.0;
    double latency_median_s = 0.0;
};

inline std::vector<WindowStudyRow> window_size_study(const Manifest& base,
                                                     const std::vector<std::size_t>& sizes,
                                                     const std::string& out_dir) {
    if (sizes.empty()) throw DataError("window_size_study: need at least one size");
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    std::vector<WindowStudyRow> rows;
    std::vector<std::pair<std::string, double>> timings;
    const auto [normalized, stats] = prepare_trace(base);

    for (std::size_t size : sizes) {
        Manifest m = base;
        m.train.window = size;
        m.train_seeds = {base.train_seeds.empty() ? 1 : base.train_seeds[0]};
        const SchedulePlan plan = plan_from_manifest(m);
        ScenarioResult scenario = run_scenario(m, "window_" + std::to_string(size), plan,
                                               normalized, timings);

        // Latency of the full streaming pipeline at this window size.
        const LabeledSeries labeled = build_labeled_dataset(normalized, plan, m.seed);
        const FeaturePack pack = compute_features(labeled, scenario.rema, m.windows);
        const FeatureScaler scaler =
            fit_feature_scaler(pack, 0, contiguous_split(labeled.size(), m.train_frac,
                                                         m.val_frac).train_end);
        TrainConfig cfg = m.train;
        cfg.seed = m.train_seeds[0];
        cfg.epochs = 1;  // weights do not matter for timing
        const SplitBounds split = contiguous_split(labeled.size(), m.train_frac, m.val_frac);
        SequenceDataset train_det =
            make_detection_dataset(pack, scale_pack(pack, scaler), labeled, 0, split.train_end,
                                   cfg.window);
        GruModel detector = train_gru(train_det, train_det, cfg);
        detector.scaler = scaler;

        std::vector<double> raw(2000);
        for (std::size_t i = 0; i < raw.size(); ++i)
            raw[i] = denormalize(labeled.channel(Channel::latitude).corrupted[i], stats,
                                 Channel::latitude);
        PipelineConfig pcfg{scenario.rema, m.windows, m.time_cfg};
        const LatencyStats lat = bench_latency(
            [&] { return ChannelPipeline(Channel::latitude, stats, pcfg, &detector, nullptr); },
            raw, 3);

        rows.push_back({size, scenario.mean_f1_anomaly, scenario.mean_f1_normal,
                        scenario.mean_overall_f1, lat.median_s});
    }

    CsvWriter w(out_dir + "/window_study.csv");
    w.row({"window", "f1_anomaly", "f1_normal", "overall_f1", "latency_median_s"});
    for (const auto& r : rows)
        w.row({std::to_string(r.window), format_double(r.f1_anomaly),
               format_double(r.f1_normal), format_double(r.overall_f1),
               format_double(r.latency_median_s)});
    return rows;
}

}  // namespace grad
