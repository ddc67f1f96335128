#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "benchcast/encoding.hpp"
#include "benchcast/linalg.hpp"

namespace benchcast {

// Least-squares polynomial regression over the encoded features: an
// intercept, powers 1..degree of each numeric column, and the one-hot
// columns at degree 1. No cross terms. One-hot groups are collinear with
// the intercept, so the solve must tolerate rank deficiency; the fit is
// the minimum-norm solution.
struct PolynomialModel {
    int degree = 3;
    std::vector<bool> numeric_col;  // per encoded column
    std::vector<double> coef;       // [intercept, expanded features...]

    std::size_t expanded_width() const {
        std::size_t w = 1;
        for (bool n : numeric_col) w += n ? static_cast<std::size_t>(degree) : 1;
        return w;
    }

    void expand(std::span<const double> x, std::vector<double>& row) const {
        row.clear();
        row.push_back(1.0);
        for (std::size_t c = 0; c < numeric_col.size(); ++c) {
            if (numeric_col[c]) {
                double p = 1.0;
                for (int d = 0; d < degree; ++d) {
                    p *= x[c];
                    row.push_back(p);
                }
            } else {
                row.push_back(x[c]);
            }
        }
    }

    double predict_encoded(std::span<const double> x) const {
        std::vector<double> row;
        expand(x, row);
        double out = 0.0;
        for (std::size_t i = 0; i < row.size(); ++i) out += coef[i] * row[i];
        return out;
    }

    nlohmann::json to_json() const {
        std::vector<int> nc(numeric_col.begin(), numeric_col.end());
        return nlohmann::json{{"degree", degree}, {"numeric_col", nc}, {"coef", coef}};
    }

    static PolynomialModel from_json(const nlohmann::json& j) {
        PolynomialModel m;
        m.degree = j.at("degree").get<int>();
        auto nc = j.at("numeric_col").get<std::vector<int>>();
        m.numeric_col.assign(nc.begin(), nc.end());
        m.coef = j.at("coef").get<std::vector<double>>();
        return m;
    }
};

inline PolynomialModel fit_poly(const EncodedMatrix& x, std::span<const double> times,
                                int degree) {
    if (degree < 1 || degree > 3)
        throw std::invalid_argument(
            "train_poly: degree must be 1, 2 or 3 (higher degrees are not supported)");
    if (x.rows == 0) throw std::invalid_argument("train_poly: empty training set");

    PolynomialModel m;
    m.degree = degree;
    m.numeric_col.reserve(x.cols);
    for (const auto& col : x.columns) m.numeric_col.push_back(col.category.empty());

    std::size_t width = m.expanded_width();
    if (width >= x.rows)
        throw std::invalid_argument("train_poly: expansion width " +
                                    std::to_string(width) +
                                    " must be smaller than the training row count " +
                                    std::to_string(x.rows));

    Matrix a(x.rows, width);
    std::vector<double> row;
    for (std::size_t r = 0; r < x.rows; ++r) {
        m.expand(x.row(r), row);
        for (std::size_t c = 0; c < width; ++c) a.at(r, c) = row[c];
    }
    m.coef = solve_least_squares_minnorm(a, times);
    return m;
}

}  // namespace benchcast
