#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include <json.hpp>

#include "benchcast/encoding.hpp"

namespace benchcast {

// k-nearest-neighbors regressor over the encoded feature space. Prediction
// is the mean observed time of the k nearest stored rows under Euclidean
// distance; equal distances resolve to the lower stored-row index.
struct KnnModel {
    int k = 3;
    EncodedMatrix points;
    std::vector<double> times;

    double predict_encoded(std::span<const double> x) const {
        std::vector<std::pair<double, std::size_t>> dist(points.rows);
        for (std::size_t r = 0; r < points.rows; ++r) {
            std::span<const double> p = points.row(r);
            double d2 = 0.0;
            for (std::size_t c = 0; c < points.cols; ++c) {
                double d = p[c] - x[c];
                d2 += d * d;
            }
            dist[r] = {d2, r};
        }
        std::sort(dist.begin(), dist.end());
        double sum = 0.0;
        auto kk = static_cast<std::size_t>(k);
        for (std::size_t i = 0; i < kk; ++i) sum += times[dist[i].second];
        return sum / static_cast<double>(kk);
    }

    nlohmann::json to_json() const {
        return nlohmann::json{{"k", k},
                              {"rows", points.rows},
                              {"cols", points.cols},
                              {"data", points.data},
                              {"times", times}};
    }

    // Encoded column metadata lives with the predictor's encoder; only the
    // raw matrix is stored here.
    static KnnModel from_json(const nlohmann::json& j) {
        KnnModel m;
        m.k = j.at("k").get<int>();
        m.points.rows = j.at("rows").get<std::size_t>();
        m.points.cols = j.at("cols").get<std::size_t>();
        m.points.data = j.at("data").get<std::vector<double>>();
        m.times = j.at("times").get<std::vector<double>>();
        return m;
    }
};

inline KnnModel fit_knn(const EncodedMatrix& train_points,
                        std::vector<double> train_times, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > train_points.rows)
        throw std::invalid_argument("train_knn: k must be in [1, n_train]");
    KnnModel m;
    m.k = k;
    m.points = train_points;
    m.times = std::move(train_times);
    return m;
}

}  // namespace benchcast
