#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "benchcast/dataset.hpp"
#include "benchcast/encoding.hpp"
#include "benchcast/knn.hpp"
#include "benchcast/neural_net.hpp"
#include "benchcast/polynomial.hpp"
#include "benchcast/tree.hpp"

namespace benchcast {

enum class Family { Tree, Knn, NeuralNet, Polynomial };

inline std::string to_string(Family f) {
    switch (f) {
        case Family::Tree: return "tree";
        case Family::Knn: return "knn";
        case Family::NeuralNet: return "neural_net";
        case Family::Polynomial: return "polynomial";
    }
    return "unknown";
}

inline Family family_from_string(const std::string& s) {
    if (s == "tree") return Family::Tree;
    if (s == "knn") return Family::Knn;
    if (s == "neural_net" || s == "nn") return Family::NeuralNet;
    if (s == "polynomial" || s == "poly") return Family::Polynomial;
    throw std::invalid_argument("unknown learner family '" + s + "'");
}

// Family-specific settings as a flat name -> number map; each family reads
// the keys it knows and falls back to the published defaults.
using Hyperparams = std::map<std::string, double>;

inline double hp_get(const Hyperparams& hp, const std::string& key, double fallback) {
    auto it = hp.find(key);
    return it == hp.end() ? fallback : it->second;
}

struct TrainingMeta {
    std::uint64_t seed = 1;
    std::array<double, 3> fractions{0.5, 0.25, 0.25};
    std::string benchmark = "general";
    std::size_t n_rows = 0;
};

struct PredictDetail {
    double raw = 0.0;
    double value = 0.0;
    bool clamped = false;
    std::size_t unknown_categories = 0;
};

// A trained, immutable model. Prediction is deterministic, and a predictor
// serialized to JSON and reloaded yields bit-identical predictions.
class Predictor {
  public:
    using Model = std::variant<TreeModel, KnnModel, NeuralNetModel, PolynomialModel>;

    Predictor() = default;
    Predictor(Family family, Hyperparams hp, DatasetSchema schema,
              std::optional<Encoder> encoder, Model model, TrainingMeta meta)
        : family_(family),
          hp_(std::move(hp)),
          schema_(std::move(schema)),
          encoder_(std::move(encoder)),
          model_(std::move(model)),
          meta_(std::move(meta)) {}

    Family family() const { return family_; }
    const Hyperparams& hyperparams() const { return hp_; }
    const DatasetSchema& schema() const { return schema_; }
    const TrainingMeta& meta() const { return meta_; }
    const Encoder& encoder() const { return *encoder_; }
    const Model& model() const { return model_; }

    PredictDetail predict_detail(const Dataset& ds, std::size_t row) const {
        SchemaBinding binding = bind(ds.schema());
        std::vector<double> buf;
        return predict_one(ds, row, binding, buf);
    }

    double predict(const Dataset& ds, std::size_t row) const {
        return predict_detail(ds, row).value;
    }

    std::vector<double> predict_rows(const Dataset& ds,
                                     std::span<const std::size_t> rows) const {
        SchemaBinding binding = bind(ds.schema());
        std::vector<double> buf;
        std::vector<double> out;
        out.reserve(rows.size());
        for (std::size_t r : rows) out.push_back(predict_one(ds, r, binding, buf).value);
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["format"] = "benchcast-model";
        j["format_version"] = 1;
        j["family"] = to_string(family_);
        j["hyperparameters"] = hp_;
        j["schema"] = schema_.to_json();
        if (encoder_) j["encoder"] = encoder_->to_json();
        j["training"] = {{"seed", meta_.seed},
                         {"fractions", meta_.fractions},
                         {"benchmark", meta_.benchmark},
                         {"n_rows", meta_.n_rows}};
        std::visit([&](const auto& m) { j["state"] = m.to_json(); }, model_);
        return j;
    }

    static Predictor from_json(const nlohmann::json& j) {
        if (j.value("format", "") != "benchcast-model")
            throw std::invalid_argument("model file: unrecognized format tag");
        if (j.value("format_version", 0) != 1)
            throw std::invalid_argument("model file: unsupported format version");
        Predictor p;
        p.family_ = family_from_string(j.at("family").get<std::string>());
        p.hp_ = j.at("hyperparameters").get<Hyperparams>();
        p.schema_ = DatasetSchema::from_json(j.at("schema"));
        if (j.contains("encoder")) p.encoder_ = Encoder::from_json(j["encoder"]);
        const auto& jt = j.at("training");
        p.meta_.seed = jt.at("seed").get<std::uint64_t>();
        auto fr = jt.at("fractions").get<std::vector<double>>();
        p.meta_.fractions = {fr.at(0), fr.at(1), fr.at(2)};
        p.meta_.benchmark = jt.at("benchmark").get<std::string>();
        p.meta_.n_rows = jt.at("n_rows").get<std::size_t>();
        switch (p.family_) {
            case Family::Tree: p.model_ = TreeModel::from_json(j.at("state")); break;
            case Family::Knn: p.model_ = KnnModel::from_json(j.at("state")); break;
            case Family::NeuralNet:
                p.model_ = NeuralNetModel::from_json(j.at("state"));
                break;
            case Family::Polynomial:
                p.model_ = PolynomialModel::from_json(j.at("state"));
                break;
        }
        return p;
    }

  private:
    SchemaBinding bind(const DatasetSchema& data) const {
        if (family_ == Family::Tree)
            return bind_columns(schema_, data, schema_.input_indices());
        return encoder_->bind(data);
    }

    PredictDetail predict_one(const Dataset& ds, std::size_t row,
                              const SchemaBinding& binding,
                              std::vector<double>& buf) const {
        PredictDetail d;
        if (family_ == Family::Tree) {
            d.raw = std::get<TreeModel>(model_).predict_bound(ds, row, binding);
        } else {
            EncodeStats stats;
            encoder_->transform_row(ds, row, binding, buf, &stats);
            d.unknown_categories = stats.unknown_categories;
            switch (family_) {
                case Family::Knn:
                    d.raw = std::get<KnnModel>(model_).predict_encoded(buf);
                    break;
                case Family::NeuralNet:
                    d.raw = std::get<NeuralNetModel>(model_).predict_encoded(buf);
                    break;
                case Family::Polynomial:
                    d.raw = std::get<PolynomialModel>(model_).predict_encoded(buf);
                    break;
                default: break;
            }
        }
        // Negative time is not meaningful; clamp and flag.
        d.clamped = d.raw < 0.0;
        d.value = d.clamped ? 0.0 : d.raw;
        return d;
    }

    Family family_ = Family::Tree;
    Hyperparams hp_;
    DatasetSchema schema_;
    std::optional<Encoder> encoder_;
    Model model_;
    TrainingMeta meta_;
};

inline Predictor train_tree(const Dataset& ds, std::span<const std::size_t> rows,
                            int min_instances_per_branch, TrainingMeta meta = {}) {
    TreeModel m = fit_tree(ds, rows, min_instances_per_branch);
    meta.n_rows = rows.size();
    return Predictor(Family::Tree,
                     {{"min_instances", static_cast<double>(min_instances_per_branch)}},
                     ds.schema(), std::nullopt, std::move(m), meta);
}

inline Predictor train_knn(const Dataset& ds, std::span<const std::size_t> rows,
                           int k, TrainingMeta meta = {}) {
    if (rows.empty()) throw std::invalid_argument("train_knn: empty training set");
    Encoder enc = Encoder::fit(ds, rows);
    EncodedMatrix x = enc.transform(ds, rows, nullptr, true);
    std::vector<double> times;
    times.reserve(rows.size());
    for (std::size_t r : rows) times.push_back(ds.exe_time(r));
    KnnModel m = fit_knn(x, std::move(times), k);
    meta.n_rows = rows.size();
    return Predictor(Family::Knn, {{"k", static_cast<double>(k)}}, ds.schema(),
                     std::move(enc), std::move(m), meta);
}

inline Predictor train_nn(const Dataset& ds, std::span<const std::size_t> rows,
                          const NnOptions& opt, TrainingMeta meta = {}) {
    if (rows.empty()) throw std::invalid_argument("train_nn: empty training set");
    Encoder enc = Encoder::fit(ds, rows);
    EncodedMatrix x = enc.transform(ds, rows, nullptr, true);
    std::vector<double> times;
    times.reserve(rows.size());
    for (std::size_t r : rows) times.push_back(ds.exe_time(r));
    NeuralNetModel m = fit_nn(x, times, opt);
    meta.n_rows = rows.size();
    return Predictor(Family::NeuralNet,
                     {{"hidden", static_cast<double>(opt.hidden)},
                      {"lr", opt.lr},
                      {"max_iter", static_cast<double>(opt.max_iter)}},
                     ds.schema(), std::move(enc), std::move(m), meta);
}

inline Predictor train_poly(const Dataset& ds, std::span<const std::size_t> rows,
                            int degree, TrainingMeta meta = {}) {
    if (rows.empty()) throw std::invalid_argument("train_poly: empty training set");
    Encoder enc = Encoder::fit(ds, rows);
    EncodedMatrix x = enc.transform(ds, rows, nullptr, true);
    std::vector<double> times;
    times.reserve(rows.size());
    for (std::size_t r : rows) times.push_back(ds.exe_time(r));
    PolynomialModel m = fit_poly(x, times, degree);
    meta.n_rows = rows.size();
    return Predictor(Family::Polynomial, {{"degree", static_cast<double>(degree)}},
                     ds.schema(), std::move(enc), std::move(m), meta);
}

// Single entry point used by the selection and CLI layers.
inline Predictor train_family(const Dataset& ds, std::span<const std::size_t> rows,
                              Family family, const Hyperparams& hp,
                              TrainingMeta meta = {}) {
    switch (family) {
        case Family::Tree:
            return train_tree(ds, rows,
                              static_cast<int>(hp_get(hp, "min_instances", 1)), meta);
        case Family::Knn:
            return train_knn(ds, rows, static_cast<int>(hp_get(hp, "k", 3)), meta);
        case Family::NeuralNet: {
            NnOptions opt;
            opt.hidden = static_cast<int>(hp_get(hp, "hidden", 300));
            opt.lr = hp_get(hp, "lr", 0.2);
            opt.max_iter = static_cast<int>(hp_get(hp, "max_iter", 1000));
            opt.seed = meta.seed;
            return train_nn(ds, rows, opt, meta);
        }
        case Family::Polynomial:
            return train_poly(ds, rows, static_cast<int>(hp_get(hp, "degree", 3)),
                              meta);
    }
    throw std::logic_error("train_family: unreachable");
}

inline void save_model(const Predictor& p, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_model: cannot open " + path.string());
    out << p.to_json().dump(2) << "\n";
}

inline Predictor load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_model: cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    return Predictor::from_json(j);
}

}  // namespace benchcast
