// grad — GPS-trace anomaly detection toolkit CLI.
//
// Subcommands cover the full pipeline: preprocess, inject, tune-rema,
// features, train, predict, recover, evaluate, bench, study-window, plus
// experiment for manifest-driven runs.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 stage failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "grad/experiment.hpp"
#include "grad/inject.hpp"
#include "grad/model_io.hpp"
#include "grad/pipeline.hpp"
#include "grad/rema.hpp"
#include "grad/synth.hpp"
#include "grad/trace.hpp"

namespace fs = std::filesystem;
using namespace grad;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::uint64_t seed = 42;
    bool seed_set = false;
    std::string out_dir = "out";

    ColumnMapping columns;
    WindowConfig windows;
    TimeClassifierConfig time_cfg;
    double train_frac = 0.6;
    double val_frac = 0.2;

    void load_config() {
        if (config_path.empty()) return;
        const auto j = nlohmann::json::parse(read_file_bytes(config_path));
        if (j.contains("columns")) {
            const auto& c = j.at("columns");
            columns.timestamp = c.value("timestamp", columns.timestamp);
            columns.latitude = c.value("latitude", columns.latitude);
            columns.longitude = c.value("longitude", columns.longitude);
            columns.speed = c.value("speed", columns.speed);
        }
        if (j.contains("features")) {
            const auto& f = j.at("features");
            windows.regression_window = f.value("regression_window", windows.regression_window);
            windows.stat_window = f.value("stat_window", windows.stat_window);
            windows.rsi_window = f.value("rsi_window", windows.stat_window);
        }
        if (j.contains("time_classifier")) {
            const auto& t = j.at("time_classifier");
            time_cfg.transient_max = t.value("transient_max", time_cfg.transient_max);
            time_cfg.intermittent_min_episodes =
                t.value("intermittent_min_episodes", time_cfg.intermittent_min_episodes);
            time_cfg.horizon = t.value("horizon", time_cfg.horizon);
            time_cfg.permanent_min = t.value("permanent_min", time_cfg.permanent_min);
        }
        if (j.contains("split")) {
            train_frac = j.at("split").value("train", train_frac);
            val_frac = j.at("split").value("val", val_frac);
        }
    }
};

SchedulePlan load_plan(const std::string& path) {
    const auto j = nlohmann::json::parse(read_file_bytes(path));
    SchedulePlan plan;
    if (j.contains("preset")) {
        const std::string preset = j.at("preset").get<std::string>();
        if (preset == "mmitss") plan = mmitss_plan();
        else if (preset == "zurich") plan = zurich_plan();
        else if (preset == "instant")
            plan = instant_only_plan(j.value("instant_rate", 0.08), 25.0);
        else throw DataError("unknown plan preset: " + preset);
    }
    if (j.contains("channels")) {
        plan.channels.clear();
        for (const auto& c : j.at("channels")) {
            ChannelRates cr;
            cr.channel = channel_from_name(c.at("channel").get<std::string>());
            const auto& r = c.at("rates");
            cr.rates.transient_noise = r.value("transient_noise", 0.0);
            cr.rates.transient_jump = r.value("transient_jump", 0.0);
            cr.rates.intermittent_noise = r.value("intermittent_noise", 0.0);
            cr.rates.intermittent_jump = r.value("intermittent_jump", 0.0);
            cr.rates.permanent_noise = r.value("permanent_noise", 0.0);
            cr.rates.permanent_jump = r.value("permanent_jump", 0.0);
            plan.channels.push_back(cr);
        }
    }
    if (j.contains("magnitudes")) {
        const auto& g = j.at("magnitudes");
        plan.magnitudes.instant_scale = g.value("instant_scale", plan.magnitudes.instant_scale);
        plan.magnitudes.jump_bound = g.value("jump_bound", plan.magnitudes.jump_bound);
        plan.magnitudes.drift_endpoint =
            g.value("drift_endpoint", plan.magnitudes.drift_endpoint);
        plan.magnitudes.allow_drift = g.value("allow_drift", plan.magnitudes.allow_drift);
    }
    plan.min_gap = j.value("min_gap", plan.min_gap);
    plan.transient_max = j.value("transient_max", plan.transient_max);
    plan.intermittent_min_episodes =
        j.value("intermittent_min_episodes", plan.intermittent_min_episodes);
    plan.horizon = j.value("horizon", plan.horizon);
    plan.permanent_min = j.value("permanent_min", plan.permanent_min);
    plan.permanent_max = j.value("permanent_max", plan.permanent_max);
    return plan;
}

// Normalized labeled series for commands that start from labeled.csv.
LabeledSeries load_labeled(const std::string& path) { return read_labeled_csv(path); }

void write_predictions_csv(const std::string& path, const FeaturePack& pack,
                           const std::vector<std::vector<StepPrediction>>& preds) {
    CsvWriter w(path);
    w.row({"step", "channel", "detect", "bias", "p_normal", "p_anomaly"});
    const std::size_t off = pack.frame_offset();
    for (std::size_t ci = 0; ci < pack.channels.size(); ++ci) {
        for (std::size_t f = 0; f < preds[ci].size(); ++f) {
            const auto& p = preds[ci][f];
            w.row({std::to_string(f + off), channel_name(pack.channels[ci]),
                   p.detect ? "1" : "0", to_string(p.bias), format_double(p.probs[0]),
                   format_double(p.probs[1])});
        }
    }
}

int cmd_preprocess(const GlobalOpts& g, const std::string& input) {
    fs::create_directories(g.out_dir);
    ParseResult parsed = parse_trace(input, g.columns);
    if (parsed.trace.size() == 0) throw DataError("no valid rows in " + input);
    write_rejects_csv(g.out_dir + "/rejects.csv", parsed.rejects);

    Trace trace = sort_merge(parsed.trace);
    auto [filled, report] = interpolate_missing(trace);
    const SplitBounds split = contiguous_split(filled.size(), g.train_frac, g.val_frac);
    const NormStats stats = fit_norm_stats(filled, 0, split.train_end);
    for (std::size_t c = 0; c < kNumChannels; ++c)
        if (stats.per_channel[c].degenerate)
            std::cerr << "warning: zero-variance channel " << kChannelNames[c]
                      << "; using std = 1\n";

    write_trace_csv(g.out_dir + "/cleaned.csv", filled);
    save_norm_stats(g.out_dir + "/norm_stats.csv", stats);

    std::cout << "rows: " << parsed.trace.size() + parsed.rejects.size()
              << " kept: " << filled.size() << " rejected: " << parsed.rejects.size() << "\n";
    for (std::size_t c = 0; c < kNumChannels; ++c)
        std::cout << "filled " << kChannelNames[c] << ": " << report.filled[c] << "\n";
    std::cout << "wrote " << g.out_dir << "/cleaned.csv, norm_stats.csv, rejects.csv\n";
    return 0;
}

int cmd_inject(const GlobalOpts& g, const std::string& input, const std::string& stats_path,
               const std::string& plan_path) {
    fs::create_directories(g.out_dir);
    Trace trace = read_trace_csv(input, g.columns);
    trace = sort_merge(trace);
    trace = interpolate_missing(trace).first;

    NormStats stats;
    if (!stats_path.empty()) {
        stats = load_norm_stats(stats_path);
    } else {
        stats = fit_norm_stats(trace, 0,
                               contiguous_split(trace.size(), g.train_frac, g.val_frac).train_end);
        save_norm_stats(g.out_dir + "/norm_stats.csv", stats);
    }
    const Trace normalized = normalize(trace, stats);
    const SchedulePlan plan = plan_path.empty() ? mmitss_plan() : load_plan(plan_path);
    const LabeledSeries labeled = build_labeled_dataset(normalized, plan, g.seed);
    write_labeled_csv(g.out_dir + "/labeled.csv", labeled);

    std::size_t anomalies = 0;
    for (const auto& ch : labeled.channels)
        for (const auto& l : ch.labels) anomalies += l.anomaly ? 1 : 0;
    std::cout << "injected " << anomalies << " anomalous points over "
              << labeled.injected_channels.size() << " channels (seed " << g.seed << ")\n"
              << "wrote " << g.out_dir << "/labeled.csv\n";
    return 0;
}

int cmd_tune_rema(const GlobalOpts& g, const std::string& labeled_path,
                  const std::string& grid_path) {
    fs::create_directories(g.out_dir);
    const LabeledSeries labeled = load_labeled(labeled_path);
    RemaGrid grid;
    if (!grid_path.empty()) {
        const auto j = nlohmann::json::parse(read_file_bytes(grid_path));
        grid.alpha = j.value("alpha", grid.alpha);
        grid.alpha_min = j.value("alpha_min", grid.alpha_min);
        grid.alpha_max = j.value("alpha_max", grid.alpha_max);
        grid.punish = j.value("punish", grid.punish);
        grid.reward = j.value("reward", grid.reward);
        grid.slide_size = j.value("slide_size", grid.slide_size);
        grid.sensitivity = j.value("sensitivity", grid.sensitivity);
    }
    const std::size_t train_end =
        contiguous_split(labeled.size(), g.train_frac, g.val_frac).train_end;
    const GridSearchResult result = grid_search(labeled, grid, train_end);
    save_rema_params(g.out_dir + "/rema_params.txt", result.best.params, result.best.score);
    save_grid_report(g.out_dir + "/rema_grid.csv", result);
    std::cout << "best combo " << result.best.combo_id << ": score "
              << format_double(result.best.score) << " (f1_anomaly "
              << format_double(result.best.f1_anomaly) << ", f1_normal "
              << format_double(result.best.f1_normal) << ")\n"
              << "wrote " << g.out_dir << "/rema_params.txt, rema_grid.csv\n";
    return 0;
}

int cmd_features(const GlobalOpts& g, const std::string& labeled_path,
                 const std::string& params_path) {
    fs::create_directories(g.out_dir);
    const LabeledSeries labeled = load_labeled(labeled_path);
    const RemaParams params =
        params_path.empty() ? RemaParams{} : load_rema_params(params_path).first;
    const FeaturePack pack = compute_features(labeled, params, g.windows);

    CsvWriter w(g.out_dir + "/frames.csv");
    std::vector<std::string> header = {"step", "channel"};
    for (const char* name : FeatureFrame::kNames) header.push_back(name);
    w.row(header);
    for (std::size_t ci = 0; ci < pack.channels.size(); ++ci)
        for (std::size_t f = 0; f < pack.frames[ci].size(); ++f) {
            std::vector<std::string> row = {std::to_string(f + pack.frame_offset()),
                                            channel_name(pack.channels[ci])};
            for (double v : pack.frames[ci][f].values()) row.push_back(format_double(v));
            w.row(row);
        }
    std::cout << "wrote " << g.out_dir << "/frames.csv\n";
    return 0;
}

int cmd_train(const GlobalOpts& g, const std::string& labeled_path,
              const std::string& params_path, std::size_t window, std::size_t epochs) {
    fs::create_directories(g.out_dir);
    const LabeledSeries labeled = load_labeled(labeled_path);
    const RemaParams params =
        params_path.empty() ? RemaParams{} : load_rema_params(params_path).first;
    const FeaturePack pack = compute_features(labeled, params, g.windows);
    const SplitBounds split = contiguous_split(labeled.size(), g.train_frac, g.val_frac);

    const FeatureScaler scaler = fit_feature_scaler(pack, 0, split.train_end);
    const std::vector<Mat> scaled = scale_pack(pack, scaler);

    TrainConfig cfg;
    cfg.window = window;
    cfg.seed = g.seed;
    if (epochs > 0) cfg.epochs = epochs;

    const SequenceDataset train_det =
        make_detection_dataset(pack, scaled, labeled, 0, split.train_end, cfg.window);
    const SequenceDataset val_det = make_detection_dataset(pack, scaled, labeled,
                                                           split.train_end, split.val_end,
                                                           cfg.window);
    GruModel detector = train_gru(train_det, val_det, cfg);
    detector.scaler = scaler;
    save_model(g.out_dir + "/detector.grad", detector);
    write_training_log(g.out_dir + "/detector_training.csv", detector.meta);
    std::cout << "detector: " << detector.meta.epochs_run << " epochs, best epoch "
              << detector.meta.best_epoch << "\n";

    const SequenceDataset train_bias =
        make_bias_dataset(pack, scaled, labeled, 0, split.train_end, cfg.window);
    const SequenceDataset val_bias =
        make_bias_dataset(pack, scaled, labeled, split.train_end, split.val_end, cfg.window);
    if (dataset_has_both_classes(train_bias) && dataset_has_both_classes(val_bias)) {
        GruModel bias_model = train_gru(train_bias, val_bias, cfg);
        bias_model.scaler = scaler;
        save_model(g.out_dir + "/bias_clf.grad", bias_model);
        write_training_log(g.out_dir + "/bias_clf_training.csv", bias_model.meta);
        std::cout << "bias classifier: " << bias_model.meta.epochs_run << " epochs\n";
    } else {
        std::cout << "bias classifier skipped: single-class bias labels\n";
    }
    std::cout << "wrote models to " << g.out_dir << "\n";
    return 0;
}

int cmd_predict(const GlobalOpts& g, const std::string& labeled_path,
                const std::string& params_path, const std::string& detector_path,
                const std::string& bias_path) {
    fs::create_directories(g.out_dir);
    const LabeledSeries labeled = load_labeled(labeled_path);
    const RemaParams params =
        params_path.empty() ? RemaParams{} : load_rema_params(params_path).first;
    const GruModel detector = load_model(detector_path);
    GruModel bias_model;
    const bool has_bias = !bias_path.empty();
    if (has_bias) bias_model = load_model(bias_path);

    const FeaturePack pack = compute_features(labeled, params, g.windows);
    std::vector<std::vector<StepPrediction>> preds;
    for (const auto& frames : pack.frames)
        preds.push_back(predict_stream(detector, has_bias ? &bias_model : nullptr, frames));
    write_predictions_csv(g.out_dir + "/predictions.csv", pack, preds);
    std::cout << "wrote " << g.out_dir << "/predictions.csv\n";
    return 0;
}

int cmd_recover(const GlobalOpts& g, const std::string& labeled_path,
                const std::string& params_path, const std::string& detector_path,
                const std::string& bias_path, const std::string& stats_path) {
    fs::create_directories(g.out_dir);
    const LabeledSeries labeled = load_labeled(labeled_path);
    const RemaParams params =
        params_path.empty() ? RemaParams{} : load_rema_params(params_path).first;
    const NormStats stats = load_norm_stats(stats_path);
    const GruModel detector = load_model(detector_path);
    GruModel bias_model;
    const bool has_bias = !bias_path.empty();
    if (has_bias) bias_model = load_model(bias_path);

    PipelineConfig cfg{params, g.windows, g.time_cfg};
    CsvWriter rec(g.out_dir + "/recovery.csv");
    rec.row({"timestamp", "channel", "value", "action", "bias_type", "time_type"});
    CsvWriter alog(g.out_dir + "/alerts.csv");
    alog.row({"channel", "step", "run_length"});

    for (Channel c : labeled.injected_channels) {
        ChannelPipeline pipe(c, stats, cfg, &detector, has_bias ? &bias_model : nullptr);
        const auto& ch = labeled.channel(c);
        for (std::size_t i = 0; i < labeled.size(); ++i) {
            const double raw = denormalize(ch.corrupted[i], stats, c);
            const auto r = pipe.push(raw);
            rec.row({format_double(labeled.timestamps[i]), channel_name(c),
                     format_double(r.recovery.value), to_string(r.recovery.action),
                     to_string(r.recovery.bias_type), to_string(r.recovery.time_type)});
        }
        for (const auto& a : pipe.alerts())
            alog.row({channel_name(c), std::to_string(a.step), std::to_string(a.run_length)});
    }
    std::cout << "wrote " << g.out_dir << "/recovery.csv, alerts.csv\n";
    return 0;
}

int cmd_evaluate(const GlobalOpts& g, const std::string& predictions_path,
                 const std::string& labeled_path) {
    fs::create_directories(g.out_dir);
    const LabeledSeries labeled = load_labeled(labeled_path);
    const CsvTable preds = read_csv(predictions_path);
    const int cs = preds.column("step"), cc = preds.column("channel"),
              cd = preds.column("detect"), cb = preds.column("bias");
    if (cs < 0 || cc < 0 || cd < 0 || cb < 0)
        throw DataError("predictions file missing columns: " + predictions_path);

    std::vector<char> det_pred, det_truth, mask;
    std::vector<int> bias_pred, bias_truth;
    for (const auto& row : preds.rows) {
        std::uint64_t step;
        if (!parse_u64(row[static_cast<std::size_t>(cs)], step))
            throw DataError("malformed step in predictions");
        const Channel ch = channel_from_name(row[static_cast<std::size_t>(cc)]);
        if (step >= labeled.size()) throw DataError("prediction step out of range");
        const AnomalyLabel& truth = labeled.channel(ch).labels[step];
        const bool detect = row[static_cast<std::size_t>(cd)] == "1";
        const BiasType bias = bias_type_from_string(row[static_cast<std::size_t>(cb)]);
        det_pred.push_back(detect ? 1 : 0);
        det_truth.push_back(truth.anomaly ? 1 : 0);
        mask.push_back(truth.anomaly && detect ? 1 : 0);
        bias_pred.push_back(bias == BiasType::jump ? 1 : 0);
        bias_truth.push_back(truth.bias == BiasType::jump ? 1 : 0);
    }

    const DetectionScore score = score_detection(det_pred, det_truth);
    CsvWriter w(g.out_dir + "/metrics.csv");
    w.row({"group", "label", "precision", "recall", "f1"});
    w.row({"detection", "normal", format_double(score.normal.precision),
           format_double(score.normal.recall), format_double(score.normal.f1)});
    w.row({"detection", "anomaly", format_double(score.anomaly.precision),
           format_double(score.anomaly.recall), format_double(score.anomaly.f1)});
    w.row({"detection", "overall_f1", "", "", format_double(score.overall_f1())});

    bool any_masked = false;
    for (char m : mask) any_masked |= m != 0;
    if (any_masked) {
        const auto cls = score_classification(bias_pred, bias_truth, mask, {"noise", "jump"});
        for (std::size_t c = 0; c < cls.per_class.size(); ++c)
            w.row({"bias", cls.matrix.labels[c], format_double(cls.per_class[c].precision),
                   format_double(cls.per_class[c].recall), format_double(cls.per_class[c].f1)});
    }
    std::cout << "f1_normal " << format_double(score.normal.f1) << "\n"
              << "f1_anomaly " << format_double(score.anomaly.f1) << "\n"
              << "overall_f1 " << format_double(score.overall_f1()) << "\n"
              << "wrote " << g.out_dir << "/metrics.csv\n";
    return 0;
}

int cmd_bench(const GlobalOpts& g, const std::string& labeled_path,
              const std::string& params_path, const std::string& detector_path,
              const std::string& stats_path, std::size_t reps, std::size_t points) {
    const LabeledSeries labeled = load_labeled(labeled_path);
    const RemaParams params =
        params_path.empty() ? RemaParams{} : load_rema_params(params_path).first;
    const NormStats stats = stats_path.empty() ? NormStats{} : load_norm_stats(stats_path);
    const GruModel detector = load_model(detector_path);

    const Channel c = labeled.injected_channels.empty() ? Channel::latitude
                                                        : labeled.injected_channels[0];
    const auto& series = labeled.channel(c).corrupted;
    std::vector<double> raw(std::min(points, series.size()));
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = denormalize(series[i], stats, c);

    PipelineConfig cfg{params, g.windows, g.time_cfg};
    const LatencyStats lat = bench_latency(
        [&] { return ChannelPipeline(c, stats, cfg, &detector, nullptr); }, raw, reps);
    std::cout << "points " << lat.points << "\n"
              << "median_s " << format_double(lat.median_s) << "\n"
              << "p99_s " << format_double(lat.p99_s) << "\n"
              << "mean_s " << format_double(lat.mean_s) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GPS sensor-stream anomaly detection toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON config with shared defaults");
    auto* seed_opt = app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--out", g.out_dir, "Output directory");

    std::string input, stats_path, plan_path, labeled_path, grid_path, params_path;
    std::string detector_path, bias_path, predictions_path, manifest_path, sizes_arg;
    std::size_t window = 10, epochs = 0, reps = 5, points = 2000;

    auto* preprocess = app.add_subcommand("preprocess", "Parse, order, fill and fit stats");
    preprocess->add_option("--input", input, "Raw trace CSV")->required();

    auto* inject = app.add_subcommand("inject", "Corrupt a clean trace with labeled anomalies");
    inject->add_option("--input", input, "Cleaned trace CSV")->required();
    inject->add_option("--stats", stats_path, "Normalization stats CSV");
    inject->add_option("--plan", plan_path, "Injection plan JSON");

    auto* tune = app.add_subcommand("tune-rema", "Grid-search REMA hyperparameters");
    tune->add_option("--labeled", labeled_path, "Labeled dataset CSV")->required();
    tune->add_option("--grid", grid_path, "Grid JSON (candidate lists)");

    auto* features = app.add_subcommand("features", "Export per-step feature frames");
    features->add_option("--labeled", labeled_path, "Labeled dataset CSV")->required();
    features->add_option("--params", params_path, "Tuned REMA params file");

    auto* train = app.add_subcommand("train", "Train detector and bias classifier");
    train->add_option("--labeled", labeled_path, "Labeled dataset CSV")->required();
    train->add_option("--params", params_path, "Tuned REMA params file");
    train->add_option("--window", window, "Feed window length");
    train->add_option("--epochs", epochs, "Max epochs (default 50)");

    auto* predict = app.add_subcommand("predict", "Per-step detection + bias classification");
    predict->add_option("--labeled", labeled_path, "Labeled dataset CSV")->required();
    predict->add_option("--params", params_path, "Tuned REMA params file");
    predict->add_option("--detector", detector_path, "Detector model file")->required();
    predict->add_option("--bias-clf", bias_path, "Bias classifier model file");

    auto* recover = app.add_subcommand("recover", "Stream recovery with alerts");
    recover->add_option("--labeled", labeled_path, "Labeled dataset CSV")->required();
    recover->add_option("--params", params_path, "Tuned REMA params file");
    recover->add_option("--detector", detector_path, "Detector model file")->required();
    recover->add_option("--bias-clf", bias_path, "Bias classifier model file");
    recover->add_option("--stats", stats_path, "Normalization stats CSV")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Score predictions against ground truth");
    evaluate->add_option("--predictions", predictions_path, "predictions.csv")->required();
    evaluate->add_option("--labeled", labeled_path, "Labeled dataset CSV")->required();

    auto* bench = app.add_subcommand("bench", "Per-point latency of the full pipeline");
    bench->add_option("--labeled", labeled_path, "Labeled dataset CSV")->required();
    bench->add_option("--params", params_path, "Tuned REMA params file");
    bench->add_option("--detector", detector_path, "Detector model file")->required();
    bench->add_option("--stats", stats_path, "Normalization stats CSV");
    bench->add_option("--reps", reps, "Repetitions (>= 3)");
    bench->add_option("--points", points, "Stream length to time");

    auto* study = app.add_subcommand("study-window", "Metrics/latency across window sizes");
    study->add_option("--manifest", manifest_path, "Experiment manifest JSON")->required();
    study->add_option("--sizes", sizes_arg, "Comma-separated window sizes (default 10,50)");

    auto* experiment = app.add_subcommand("experiment", "Run a manifest end to end");
    experiment->add_option("--manifest", manifest_path, "Experiment manifest JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 1;
    }

    try {
        g.load_config();
        g.seed_set = seed_opt->count() > 0;

        if (*preprocess) return cmd_preprocess(g, input);
        if (*inject) return cmd_inject(g, input, stats_path, plan_path);
        if (*tune) return cmd_tune_rema(g, labeled_path, grid_path);
        if (*features) return cmd_features(g, labeled_path, params_path);
        if (*train) return cmd_train(g, labeled_path, params_path, window, epochs);
        if (*predict) return cmd_predict(g, labeled_path, params_path, detector_path, bias_path);
        if (*recover)
            return cmd_recover(g, labeled_path, params_path, detector_path, bias_path,
                               stats_path);
        if (*evaluate) return cmd_evaluate(g, predictions_path, labeled_path);
        if (*bench)
            return cmd_bench(g, labeled_path, params_path, detector_path, stats_path, reps,
                             points);
        if (*study) {
            Manifest m = load_manifest(manifest_path);
            if (g.seed_set) m.seed = g.seed;
            std::vector<std::size_t> sizes;
            std::string token;
            std::istringstream ss(sizes_arg.empty() ? std::string("10,50") : sizes_arg);
            while (std::getline(ss, token, ',')) sizes.push_back(std::stoul(token));
            const auto rows = window_size_study(m, sizes, g.out_dir);
            for (const auto& r : rows)
                std::cout << "window " << r.window << ": overall_f1 "
                          << format_double(r.overall_f1) << ", latency_median_s "
                          << format_double(r.latency_median_s) << "\n";
            std::cout << "wrote " << g.out_dir << "/window_study.csv\n";
            return 0;
        }
        if (*experiment) {
            Manifest m = load_manifest(manifest_path);
            if (g.seed_set) m.seed = g.seed;
            const auto result = run_experiment(m, g.out_dir);
            for (const auto& s : result.scenarios)
                std::cout << s.name << ": mean f1_anomaly " << format_double(s.mean_f1_anomaly)
                          << ", mean f1_normal " << format_double(s.mean_f1_normal) << "\n";
            std::cout << "report bundle in " << g.out_dir << "\n";
            return 0;
        }
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const StageError& e) {
        std::cerr << "stage failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
