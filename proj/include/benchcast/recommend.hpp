#pragma once

#include <limits>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "benchcast/dataset.hpp"
#include "benchcast/encoding.hpp"
#include "benchcast/metrics.hpp"
#include "benchcast/predictor.hpp"
#include "benchcast/rng.hpp"
#include "benchcast/selection.hpp"

namespace benchcast {

struct KmeansResult {
    int k = 0;
    std::vector<int> assignment;     // per input row
    std::vector<double> centroids;   // k x cols, row-major
    double wcss = 0.0;
    std::vector<double> wcss_history;  // one entry per Lloyd iteration
    int iterations = 0;
};

namespace kmeans_detail {

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline std::size_t distinct_rows(const EncodedMatrix& m) {
    std::set<std::vector<double>> seen;
    for (std::size_t r = 0; r < m.rows; ++r)
        seen.insert(std::vector<double>(m.row(r).begin(), m.row(r).end()));
    return seen.size();
}

}  // namespace kmeans_detail

// Lloyd's algorithm with seeded k-means++ initialization. Deterministic for
// a fixed seed. Empty clusters are repaired by promoting the point farthest
// from its current centroid. Each iteration's end-of-step WCSS is recorded
// and verified non-increasing.
inline KmeansResult kmeans(const EncodedMatrix& points, int k, std::uint64_t seed,
                           int max_iter = 100) {
    using kmeans_detail::sq_dist;
    if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
    if (points.rows == 0) throw std::invalid_argument("kmeans: no points");
    std::size_t distinct = kmeans_detail::distinct_rows(points);
    if (static_cast<std::size_t>(k) > distinct)
        throw std::invalid_argument("kmeans: k=" + std::to_string(k) +
                                    " exceeds the " + std::to_string(distinct) +
                                    " distinct rows");

    const std::size_t n = points.rows;
    const std::size_t d = points.cols;
    const auto kk = static_cast<std::size_t>(k);
    Rng rng(seed);

    // k-means++ seeding over distinct positions
    std::vector<double> centroids;
    centroids.reserve(kk * d);
    std::vector<double> best_d2(n, std::numeric_limits<double>::infinity());
    {
        std::size_t first = rng.next_index(n);
        centroids.insert(centroids.end(), points.row(first).begin(),
                         points.row(first).end());
    }
    for (std::size_t c = 1; c < kk; ++c) {
        double total = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            std::span<const double> last(centroids.data() + (c - 1) * d, d);
            best_d2[r] = std::min(best_d2[r], sq_dist(points.row(r), last));
            total += best_d2[r];
        }
        std::size_t chosen = 0;
        if (total > 0.0) {
            double u = rng.next_unit() * total;
            double acc = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                acc += best_d2[r];
                if (u < acc || r == n - 1) {
                    chosen = r;
                    break;
                }
            }
            // never pick a duplicate of an existing centroid
            while (best_d2[chosen] == 0.0) chosen = (chosen + 1) % n;
        } else {
            chosen = rng.next_index(n);
        }
        centroids.insert(centroids.end(), points.row(chosen).begin(),
                         points.row(chosen).end());
    }

    KmeansResult res;
    res.k = k;
    res.assignment.assign(n, 0);
    std::vector<std::size_t> counts(kk, 0);

    for (int iter = 0; iter < max_iter; ++iter) {
        // assignment step
        bool changed = false;
        for (std::size_t r = 0; r < n; ++r) {
            int best = 0;
            double best_dist = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < kk; ++c) {
                double dist = sq_dist(points.row(r),
                                      std::span<const double>(centroids.data() + c * d, d));
                if (dist < best_dist) {
                    best_dist = dist;
                    best = static_cast<int>(c);
                }
            }
            if (res.assignment[r] != best) {
                res.assignment[r] = best;
                changed = true;
            }
        }
        if (iter > 0 && !changed) break;

        // update step
        std::fill(centroids.begin(), centroids.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t r = 0; r < n; ++r) {
            auto c = static_cast<std::size_t>(res.assignment[r]);
            ++counts[c];
            for (std::size_t j = 0; j < d; ++j)
                centroids[c * d + j] += points.row(r)[j];
        }
        for (std::size_t c = 0; c < kk; ++c)
            if (counts[c] > 0)
                for (std::size_t j = 0; j < d; ++j)
                    centroids[c * d + j] /= static_cast<double>(counts[c]);

        // empty-cluster repair: promote the point farthest from its centroid
        for (std::size_t c = 0; c < kk; ++c) {
            if (counts[c] > 0) continue;
            std::size_t farthest = 0;
            double far_dist = -1.0;
            for (std::size_t r = 0; r < n; ++r) {
                auto home = static_cast<std::size_t>(res.assignment[r]);
                if (counts[home] <= 1) continue;
                double dist = sq_dist(points.row(r),
                                      std::span<const double>(centroids.data() + home * d, d));
                if (dist > far_dist) {
                    far_dist = dist;
                    farthest = r;
                }
            }
            auto old = static_cast<std::size_t>(res.assignment[farthest]);
            --counts[old];
            res.assignment[farthest] = static_cast<int>(c);
            counts[c] = 1;
            for (std::size_t j = 0; j < d; ++j)
                centroids[c * d + j] = points.row(farthest)[j];
        }

        double wcss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            auto c = static_cast<std::size_t>(res.assignment[r]);
            wcss += sq_dist(points.row(r),
                            std::span<const double>(centroids.data() + c * d, d));
        }
        if (!res.wcss_history.empty() &&
            wcss > res.wcss_history.back() * (1.0 + 1e-9) + 1e-12)
            throw std::logic_error("kmeans: WCSS increased between iterations");
        res.wcss_history.push_back(wcss);
        res.iterations = iter + 1;
    }

    res.centroids = std::move(centroids);
    res.wcss = res.wcss_history.empty() ? 0.0 : res.wcss_history.back();
    return res;
}

struct RecommendationPlan {
    int k = 0;
    std::vector<std::size_t> representative_rows;  // indices into the source set
    double estimated_cost = 0.0;                   // currency units
    double cost_per_hour = 0.0;
    ErrorSummary retrained_error;  // model trained on representatives vs full set

    nlohmann::json to_json(const Dataset& ds) const {
        nlohmann::json reps = nlohmann::json::array();
        for (std::size_t r : representative_rows) reps.push_back(ds.id(r));
        return nlohmann::json{{"k", k},
                              {"representatives", reps},
                              {"estimated_cost", estimated_cost},
                              {"cost_per_hour", cost_per_hour},
                              {"rae", retrained_error.rae},
                              {"mae", retrained_error.mae}};
    }
};

namespace recommend_detail {

// Representatives: the actual row nearest each centroid (ties to the lower
// row index), deduplicated while preserving centroid order. Centroids are
// points in one-hot space and need not be executable configurations; rows
// always are.
inline std::vector<std::size_t> representatives(const EncodedMatrix& points,
                                                const KmeansResult& km) {
    using kmeans_detail::sq_dist;
    std::vector<std::size_t> reps;
    const std::size_t d = points.cols;
    for (std::size_t c = 0; c < static_cast<std::size_t>(km.k); ++c) {
        std::span<const double> centroid(km.centroids.data() + c * d, d);
        std::size_t best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < points.rows; ++r) {
            double dist = sq_dist(points.row(r), centroid);
            if (dist < best_dist) {
                best_dist = dist;
                best = r;
            }
        }
        if (std::find(reps.begin(), reps.end(), best) == reps.end())
            reps.push_back(best);
    }
    return reps;
}

}  // namespace recommend_detail

// Clusters the input configurations (execution time excluded so the plan
// transfers to unmeasured environments), picks the nearest real execution to
// each centroid, estimates the cost of running the plan, and reports how
// well a model trained only on the plan reproduces the full dataset.
inline RecommendationPlan recommend_executions(const Dataset& ds, int k,
                                               Family family, const Hyperparams& hp,
                                               std::uint64_t seed,
                                               double cost_per_hour = 6.85) {
    if (ds.empty()) throw std::invalid_argument("recommend: dataset is empty");
    auto rows = ds.all_rows();
    Encoder enc = Encoder::fit(ds, rows);
    EncodedMatrix points = enc.transform(ds, rows);
    KmeansResult km = kmeans(points, k, seed);

    RecommendationPlan plan;
    plan.k = k;
    plan.cost_per_hour = cost_per_hour;
    plan.representative_rows = recommend_detail::representatives(points, km);

    for (std::size_t r : plan.representative_rows)
        plan.estimated_cost += ds.exe_time(r) / 3600.0 * cost_per_hour;

    TrainingMeta meta;
    meta.seed = seed;
    Predictor model = train_family(ds, plan.representative_rows, family, hp, meta);
    plan.retrained_error = evaluate_on(model, ds, rows);
    return plan;
}

struct KSweep {
    std::vector<RecommendationPlan> plans;
    ErrorSummary reference_error;  // model trained on the full dataset

    nlohmann::json to_json(const Dataset& ds) const {
        nlohmann::json jp = nlohmann::json::array();
        for (const auto& p : plans) jp.push_back(p.to_json(ds));
        return nlohmann::json{{"plans", jp},
                              {"reference_rae", reference_error.rae},
                              {"reference_mae", reference_error.mae}};
    }
};

inline KSweep k_sweep(const Dataset& ds, int k_from, int k_to, int k_step,
                      Family family, const Hyperparams& hp, std::uint64_t seed,
                      double cost_per_hour = 6.85) {
    if (k_from < 1 || k_to < k_from || k_step < 1)
        throw std::invalid_argument("k_sweep: invalid k range");
    KSweep sweep;
    for (int k = k_from; k <= k_to; k += k_step)
        sweep.plans.push_back(
            recommend_executions(ds, k, family, hp, seed, cost_per_hour));
    auto rows = ds.all_rows();
    TrainingMeta meta;
    meta.seed = seed;
    Predictor full = train_family(ds, rows, family, hp, meta);
    sweep.reference_error = evaluate_on(full, ds, rows);
    return sweep;
}

enum class SelectionStrategy { Recommended, Random };

inline std::string to_string(SelectionStrategy s) {
    return s == SelectionStrategy::Recommended ? "recommended" : "random";
}

struct CurvePoint {
    std::size_t size = 0;
    double median_rae = 0.0;
};

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// Learning curve for one selection strategy: pick `size` rows (cluster
// representatives or a uniform sample), train, and score against every row
// not picked; the curve reports the median over `trials` derived seeds.
inline std::vector<CurvePoint> learning_curve(const Dataset& ds,
                                              SelectionStrategy strategy,
                                              std::span<const std::size_t> sizes,
                                              Family family, const Hyperparams& hp,
                                              std::uint64_t seed, int trials) {
    if (trials < 1) throw std::invalid_argument("learning_curve: trials must be >= 1");
    for (std::size_t s : sizes)
        if (s < 1 || s > ds.size())
            throw std::invalid_argument("learning_curve: size " + std::to_string(s) +
                                        " exceeds the dataset");

    auto rows = ds.all_rows();
    Encoder enc = Encoder::fit(ds, rows);
    EncodedMatrix points = enc.transform(ds, rows);

    std::vector<CurvePoint> curve;
    for (std::size_t size : sizes) {
        std::vector<double> raes;
        for (int t = 0; t < trials; ++t) {
            std::uint64_t trial_seed = derive_seed(seed, "trial", static_cast<std::uint64_t>(t));
            std::vector<std::size_t> picked;
            if (strategy == SelectionStrategy::Recommended) {
                KmeansResult km =
                    kmeans(points, static_cast<int>(size), trial_seed);
                picked = recommend_detail::representatives(points, km);
            } else {
                Rng rng(derive_seed(trial_seed, "random", size));
                picked = rng.sample_without_replacement(ds.size(), size);
                std::sort(picked.begin(), picked.end());
            }
            std::vector<bool> in_pick(ds.size(), false);
            for (std::size_t r : picked) in_pick[r] = true;
            std::vector<std::size_t> holdout;
            for (std::size_t r = 0; r < ds.size(); ++r)
                if (!in_pick[r]) holdout.push_back(r);
            if (holdout.empty()) holdout = rows;  // size == |ds|: score on everything

            TrainingMeta meta;
            meta.seed = trial_seed;
            Predictor model = train_family(ds, picked, family, hp, meta);
            raes.push_back(evaluate_on(model, ds, holdout).rae);
        }
        curve.push_back({size, median_of(std::move(raes))});
    }
    return curve;
}

}  // namespace benchcast
