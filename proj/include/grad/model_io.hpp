// Model container: a self-describing binary file with a versioned JSON
// metadata block followed by the raw weight tensors (row-major, little-
// endian doubles). Save/load round-trips are bit-exact.
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "grad/gru.hpp"
#include "grad/util.hpp"

namespace grad {

inline constexpr char kModelMagic[8] = {'G', 'R', 'A', 'D', 'M', 'D', 'L', '1'};
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

inline void require_little_endian() {
    if constexpr (std::endian::native != std::endian::little)
        throw DataError("model container requires a little-endian host");
}

inline nlohmann::json meta_to_json(const TrainMeta& m) {
    return {{"seed", m.seed},
            {"learning_rate", m.learning_rate},
            {"epochs_run", m.epochs_run},
            {"best_epoch", m.best_epoch},
            {"train_loss", m.train_loss},
            {"val_loss", m.val_loss},
            {"val_f1_anomaly", m.val_f1_anomaly},
            {"val_f1_normal", m.val_f1_normal},
            {"class_weights", m.class_weights}};
}

inline TrainMeta meta_from_json(const nlohmann::json& j) {
    TrainMeta m;
    m.seed = j.value("seed", std::uint64_t{0});
    m.learning_rate = j.value("learning_rate", 0.0);
    m.epochs_run = j.value("epochs_run", std::size_t{0});
    m.best_epoch = j.value("best_epoch", std::size_t{0});
    m.train_loss = j.value("train_loss", std::vector<double>{});
    m.val_loss = j.value("val_loss", std::vector<double>{});
    m.val_f1_anomaly = j.value("val_f1_anomaly", std::vector<double>{});
    m.val_f1_normal = j.value("val_f1_normal", std::vector<double>{});
    m.class_weights = j.value("class_weights", Vec{});
    return m;
}

}  // namespace detail

inline void save_model(const std::string& path, const GruModel& model) {
    detail::require_little_endian();
    model.validate();

    nlohmann::json header = {
        {"input_dim", model.input_dim},
        {"window", model.window},
        {"classes", model.classes},
        {"hidden1", model.layer1.hidden},
        {"hidden2", model.layer2.hidden},
        {"feature_names", std::vector<std::string>(FeatureFrame::kNames.begin(),
                                                   FeatureFrame::kNames.end())},
        {"schema_hash", model.schema_hash},
        {"endianness", "little"},
        {"scaler",
         {{"fitted", model.scaler.fitted},
          {"mean", std::vector<double>(model.scaler.mean.begin(), model.scaler.mean.end())},
          {"std", std::vector<double>(model.scaler.stddev.begin(), model.scaler.stddev.end())}}},
        {"meta", detail::meta_to_json(model.meta)}};
    const std::string json_bytes = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open file for writing: " + path);
    out.write(kModelMagic, sizeof(kModelMagic));
    const std::uint32_t version = kModelVersion;
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    const std::uint64_t len = json_bytes.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(json_bytes.data(), static_cast<std::streamsize>(json_bytes.size()));

    detail::visit_tensors(const_cast<GruModel&>(model), [&](double* p, std::size_t n) {
        out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
    });
    if (!out) throw DataError("failed writing model file: " + path);
}

inline GruModel load_model(const std::string& path) {
    detail::require_little_endian();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kModelMagic, sizeof(magic)) != 0)
        throw DataError("not a model container: " + path);
    std::uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (version != kModelVersion)
        throw DataError("unsupported model version in " + path);
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string json_bytes(len, '\0');
    in.read(json_bytes.data(), static_cast<std::streamsize>(len));
    if (!in) throw DataError("truncated model file: " + path);

    const nlohmann::json header = nlohmann::json::parse(json_bytes);
    GruModel model;
    model.input_dim = header.at("input_dim").get<std::size_t>();
    model.window = header.at("window").get<std::size_t>();
    model.classes = header.at("classes").get<std::size_t>();
    const auto hidden1 = header.at("hidden1").get<std::size_t>();
    const auto hidden2 = header.at("hidden2").get<std::size_t>();
    model.layer1 = GruLayerWeights(hidden1, model.input_dim);
    model.layer2 = GruLayerWeights(hidden2, hidden1);
    model.head = Mat(model.classes, hidden2);
    model.head_bias.assign(model.classes, 0.0);
    model.schema_hash = header.at("schema_hash").get<std::uint64_t>();

    const auto& scaler = header.at("scaler");
    model.scaler.fitted = scaler.at("fitted").get<bool>();
    const auto mean = scaler.at("mean").get<std::vector<double>>();
    const auto stddev = scaler.at("std").get<std::vector<double>>();
    if (mean.size() != FeatureFrame::kCount || stddev.size() != FeatureFrame::kCount)
        throw DataError("model scaler does not match the feature schema: " + path);
    std::copy(mean.begin(), mean.end(), model.scaler.mean.begin());
    std::copy(stddev.begin(), stddev.end(), model.scaler.stddev.begin());
    model.meta = detail::meta_from_json(header.at("meta"));

    detail::visit_tensors(model, [&](double* p, std::size_t n) {
        in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
    });
    if (!in) throw DataError("truncated model file: " + path);
    model.validate();
    return model;
}

}  // namespace grad
