#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace benchcast {

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

namespace linalg_detail {

// Householder reflector for x = A[k.., col]: overwrites the column with the
// reflected form and returns (v, beta) implicitly packed: v stored below the
// diagonal with v[0]=1 convention kept externally. Here we keep it simple and
// return the explicit vector.
struct Reflector {
    std::vector<double> v;  // length m-k
    double beta = 0.0;
};

inline Reflector make_reflector(std::span<const double> x) {
    Reflector h;
    h.v.assign(x.begin(), x.end());
    double sigma = 0.0;
    for (std::size_t i = 1; i < h.v.size(); ++i) sigma += h.v[i] * h.v[i];
    double x0 = h.v[0];
    h.v[0] = 1.0;
    if (sigma == 0.0 && x0 >= 0.0) {
        h.beta = 0.0;
        return h;
    }
    double mu = std::sqrt(x0 * x0 + sigma);
    double v0 = x0 <= 0.0 ? x0 - mu : -sigma / (x0 + mu);
    h.beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
    for (std::size_t i = 1; i < h.v.size(); ++i) h.v[i] /= v0;
    return h;
}

// Applies (I - beta v v^T) to rows [k, m) of the given columns of M.
inline void apply_reflector(Matrix& m, const Reflector& h, std::size_t k,
                            std::size_t col_begin, std::size_t col_end) {
    if (h.beta == 0.0) return;
    for (std::size_t c = col_begin; c < col_end; ++c) {
        double dot = 0.0;
        for (std::size_t r = k; r < m.rows; ++r) dot += h.v[r - k] * m.at(r, c);
        dot *= h.beta;
        for (std::size_t r = k; r < m.rows; ++r) m.at(r, c) -= dot * h.v[r - k];
    }
}

inline void apply_reflector(std::vector<double>& y, const Reflector& h,
                            std::size_t k) {
    if (h.beta == 0.0) return;
    double dot = 0.0;
    for (std::size_t r = k; r < y.size(); ++r) dot += h.v[r - k] * y[r];
    dot *= h.beta;
    for (std::size_t r = k; r < y.size(); ++r) y[r] -= dot * h.v[r - k];
}

}  // namespace linalg_detail

// Minimum-norm least-squares solution of A x = b via a complete orthogonal
// decomposition: Householder QR with column pivoting to expose the numerical
// rank, then a second QR on the transposed leading rows to zero the
// off-triangular block. Rank-deficient systems get the unique minimum-norm
// solution instead of an arbitrary basic one.
inline std::vector<double> solve_least_squares_minnorm(const Matrix& a,
                                                       std::span<const double> b,
                                                       double rcond = 1e-12) {
    using namespace linalg_detail;
    if (a.rows != b.size())
        throw std::invalid_argument("least_squares: row count mismatch");
    if (a.rows == 0 || a.cols == 0)
        throw std::invalid_argument("least_squares: empty system");

    const std::size_t m = a.rows;
    const std::size_t n = a.cols;
    Matrix r = a;
    std::vector<double> qtb(b.begin(), b.end());
    std::vector<std::size_t> perm(n);
    for (std::size_t j = 0; j < n; ++j) perm[j] = j;

    const std::size_t kmax = std::min(m, n);
    std::size_t rank = kmax;
    double r00 = 0.0;

    for (std::size_t k = 0; k < kmax; ++k) {
        // pivot: largest remaining column norm (recomputed; matrices are small)
        std::size_t best = k;
        double best_norm = -1.0;
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += r.at(i, j) * r.at(i, j);
            if (s > best_norm) {
                best_norm = s;
                best = j;
            }
        }
        if (best != k) {
            for (std::size_t i = 0; i < m; ++i)
                std::swap(r.at(i, k), r.at(i, best));
            std::swap(perm[k], perm[best]);
        }

        std::vector<double> col(m - k);
        for (std::size_t i = k; i < m; ++i) col[i - k] = r.at(i, k);
        Reflector h = make_reflector(col);
        apply_reflector(r, h, k, k, n);
        apply_reflector(qtb, h, k);

        double diag = std::abs(r.at(k, k));
        if (k == 0) r00 = diag;
        if (diag <= rcond * r00 || diag == 0.0) {
            rank = k;
            break;
        }
    }
    if (rank == 0)
        // A is numerically zero; minimum-norm solution is zero.
        return std::vector<double>(n, 0.0);

    // R1 = top rank x n block. Second QR on R1^T yields R1 = [T^T 0] Q2^T.
    Matrix rt(n, rank);
    for (std::size_t i = 0; i < rank; ++i)
        for (std::size_t j = 0; j < n; ++j) rt.at(j, i) = r.at(i, j);

    std::vector<Reflector> q2;
    q2.reserve(rank);
    for (std::size_t k = 0; k < rank; ++k) {
        std::vector<double> col(n - k);
        for (std::size_t i = k; i < n; ++i) col[i - k] = rt.at(i, k);
        Reflector h = make_reflector(col);
        apply_reflector(rt, h, k, k, rank);
        q2.push_back(std::move(h));
    }

    // Forward-substitute T^T z = c (T upper triangular, stored in rt).
    std::vector<double> z(n, 0.0);
    for (std::size_t i = 0; i < rank; ++i) {
        double s = qtb[i];
        for (std::size_t j = 0; j < i; ++j) s -= rt.at(j, i) * z[j];
        double d = rt.at(i, i);
        if (d == 0.0)
            throw std::runtime_error("least_squares: singular triangular factor");
        z[i] = s / d;
    }

    // x~ = Q2 z (apply reflectors in reverse), then undo the column pivots.
    for (std::size_t k = rank; k-- > 0;) apply_reflector(z, q2[k], k);
    std::vector<double> x(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) x[perm[j]] = z[j];
    return x;
}

}  // namespace benchcast
