#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "benchcast/encoding.hpp"
#include "benchcast/rng.hpp"

namespace benchcast {

struct NnOptions {
    int hidden = 300;       // stock preset: 1 hidden layer of 300 units
    double lr = 0.2;
    int max_iter = 1000;
    std::uint64_t seed = 1;
};

// One-hidden-layer feed-forward net: input -> tanh(hidden) -> linear output,
// trained by full-batch gradient descent on mean squared error. The target
// is standardized during training and de-standardized at prediction time.
struct NeuralNetModel {
    std::size_t input = 0;
    std::size_t hidden = 0;
    std::vector<double> w1;  // hidden x input, row-major
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // hidden
    double b2 = 0.0;
    double y_mean = 0.0;
    double y_std = 1.0;

    double raw_output(std::span<const double> x) const {
        double out = b2;
        for (std::size_t h = 0; h < hidden; ++h) {
            double a = b1[h];
            const double* wrow = w1.data() + h * input;
            for (std::size_t i = 0; i < input; ++i) a += wrow[i] * x[i];
            out += w2[h] * std::tanh(a);
        }
        return out;
    }

    double predict_encoded(std::span<const double> x) const {
        return raw_output(x) * y_std + y_mean;
    }

    nlohmann::json to_json() const {
        return nlohmann::json{{"input", input}, {"hidden", hidden}, {"w1", w1},
                              {"b1", b1},       {"w2", w2},         {"b2", b2},
                              {"y_mean", y_mean}, {"y_std", y_std}};
    }

    static NeuralNetModel from_json(const nlohmann::json& j) {
        NeuralNetModel m;
        m.input = j.at("input").get<std::size_t>();
        m.hidden = j.at("hidden").get<std::size_t>();
        m.w1 = j.at("w1").get<std::vector<double>>();
        m.b1 = j.at("b1").get<std::vector<double>>();
        m.w2 = j.at("w2").get<std::vector<double>>();
        m.b2 = j.at("b2").get<double>();
        m.y_mean = j.at("y_mean").get<double>();
        m.y_std = j.at("y_std").get<double>();
        return m;
    }
};

namespace nn_detail {

struct Gradients {
    std::vector<double> w1;
    std::vector<double> b1;
    std::vector<double> w2;
    double b2 = 0.0;
};

// Mean squared error over standardized targets.
inline double loss(const NeuralNetModel& m, const EncodedMatrix& x,
                   std::span<const double> y_std_targets) {
    double total = 0.0;
    for (std::size_t r = 0; r < x.rows; ++r) {
        double d = m.raw_output(x.row(r)) - y_std_targets[r];
        total += d * d;
    }
    return total / static_cast<double>(x.rows);
}

inline Gradients gradients(const NeuralNetModel& m, const EncodedMatrix& x,
                           std::span<const double> y_std_targets) {
    Gradients g;
    g.w1.assign(m.w1.size(), 0.0);
    g.b1.assign(m.b1.size(), 0.0);
    g.w2.assign(m.w2.size(), 0.0);
    const auto n = static_cast<double>(x.rows);
    std::vector<double> act(m.hidden);
    for (std::size_t r = 0; r < x.rows; ++r) {
        std::span<const double> xr = x.row(r);
        double out = m.b2;
        for (std::size_t h = 0; h < m.hidden; ++h) {
            double a = m.b1[h];
            const double* wrow = m.w1.data() + h * m.input;
            for (std::size_t i = 0; i < m.input; ++i) a += wrow[i] * xr[i];
            act[h] = std::tanh(a);
            out += m.w2[h] * act[h];
        }
        double delta = 2.0 * (out - y_std_targets[r]) / n;
        g.b2 += delta;
        for (std::size_t h = 0; h < m.hidden; ++h) {
            g.w2[h] += delta * act[h];
            double dh = delta * m.w2[h] * (1.0 - act[h] * act[h]);
            g.b1[h] += dh;
            double* grow = g.w1.data() + h * m.input;
            for (std::size_t i = 0; i < m.input; ++i) grow[i] += dh * xr[i];
        }
    }
    return g;
}

// Full-batch descent until max_iter or the loss improvement drops below tol.
// A non-finite loss aborts, naming the learning rate that caused it.
inline void train_full_batch(NeuralNetModel& m, const EncodedMatrix& x,
                             std::span<const double> y_std_targets, double lr,
                             int max_iter, double tol = 1e-9) {
    double prev = loss(m, x, y_std_targets);
    if (!std::isfinite(prev))
        throw std::runtime_error("train_nn: non-finite loss at start");
    for (int it = 0; it < max_iter; ++it) {
        Gradients g = gradients(m, x, y_std_targets);
        for (std::size_t i = 0; i < m.w1.size(); ++i) m.w1[i] -= lr * g.w1[i];
        for (std::size_t i = 0; i < m.b1.size(); ++i) m.b1[i] -= lr * g.b1[i];
        for (std::size_t i = 0; i < m.w2.size(); ++i) m.w2[i] -= lr * g.w2[i];
        m.b2 -= lr * g.b2;
        double cur = loss(m, x, y_std_targets);
        if (!std::isfinite(cur))
            throw std::runtime_error(
                "train_nn: training diverged (non-finite loss) with learning rate " +
                std::to_string(lr));
        if (std::abs(prev - cur) < tol) return;
        prev = cur;
    }
}

}  // namespace nn_detail

inline NeuralNetModel fit_nn(const EncodedMatrix& x, std::span<const double> times,
                             const NnOptions& opt) {
    if (opt.hidden < 1) throw std::invalid_argument("train_nn: hidden must be >= 1");
    if (opt.lr <= 0) throw std::invalid_argument("train_nn: lr must be > 0");
    if (opt.max_iter < 1)
        throw std::invalid_argument("train_nn: max_iter must be >= 1");
    if (x.rows == 0) throw std::invalid_argument("train_nn: empty training set");

    NeuralNetModel m;
    m.input = x.cols;
    m.hidden = static_cast<std::size_t>(opt.hidden);

    double mean = 0.0;
    for (double t : times) mean += t;
    mean /= static_cast<double>(times.size());
    double var = 0.0;
    for (double t : times) var += (t - mean) * (t - mean);
    var /= static_cast<double>(times.size());
    m.y_mean = mean;
    m.y_std = var > 0 ? std::sqrt(var) : 1.0;

    std::vector<double> y(times.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = (times[i] - m.y_mean) / m.y_std;

    Rng rng(opt.seed);
    auto init = [&](std::size_t count) {
        std::vector<double> w(count);
        for (auto& v : w) v = rng.next_uniform(-0.5, 0.5);
        return w;
    };
    m.w1 = init(m.hidden * m.input);
    m.b1 = init(m.hidden);
    m.w2 = init(m.hidden);
    m.b2 = rng.next_uniform(-0.5, 0.5);

    nn_detail::train_full_batch(m, x, y, opt.lr, opt.max_iter);
    return m;
}

}  // namespace benchcast
