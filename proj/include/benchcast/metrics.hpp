#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace benchcast {

struct ErrorSummary {
    double mae = 0.0;
    double rae = 0.0;
    std::size_t n = 0;
};

namespace detail {
inline void check_pair(std::span<const double> predicted,
                       std::span<const double> observed) {
    if (predicted.size() != observed.size())
        throw std::invalid_argument("metrics: predicted/observed length mismatch");
    if (predicted.empty())
        throw std::invalid_argument("metrics: empty input");
}
}  // namespace detail

// Mean absolute error, in the unit of the inputs (seconds here).
inline double mae(std::span<const double> predicted,
                  std::span<const double> observed) {
    detail::check_pair(predicted, observed);
    double total = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        total += std::abs(predicted[i] - observed[i]);
    return total / static_cast<double>(predicted.size());
}

// Relative absolute error: total absolute error normalized by the total
// absolute deviation of the observed values from their own mean. The mean
// predictor scores exactly 1 under this definition.
inline double rae(std::span<const double> predicted,
                  std::span<const double> observed) {
    detail::check_pair(predicted, observed);
    double mean = 0.0;
    for (double o : observed) mean += o;
    mean /= static_cast<double>(observed.size());

    double err = 0.0;
    double dev = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        err += std::abs(predicted[i] - observed[i]);
        dev += std::abs(observed[i] - mean);
    }
    if (dev == 0.0)
        throw std::domain_error(
            "rae: all observed values are identical, deviation denominator is zero");
    return err / dev;
}

inline ErrorSummary error_summary(std::span<const double> predicted,
                                  std::span<const double> observed) {
    return ErrorSummary{mae(predicted, observed), rae(predicted, observed),
                        predicted.size()};
}

}  // namespace benchcast
