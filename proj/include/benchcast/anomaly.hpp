#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "benchcast/dataset.hpp"
#include "benchcast/metrics.hpp"
#include "benchcast/predictor.hpp"
#include "benchcast/selection.hpp"

namespace benchcast {

struct AnomalyParams {
    double n_sigma = 3.0;
    int hamming_h = 0;
    int min_neighbors = 2;
    double min_time_seconds = 60.0;
};

enum class AnomalyLabel { Ok, Warning, Outlier, SuspectedFailure };

inline std::string to_string(AnomalyLabel l) {
    switch (l) {
        case AnomalyLabel::Ok: return "ok";
        case AnomalyLabel::Warning: return "warning";
        case AnomalyLabel::Outlier: return "outlier";
        case AnomalyLabel::SuspectedFailure: return "suspected_failure";
    }
    return "unknown";
}

struct AnomalyVerdict {
    std::string id;
    std::size_t row = 0;
    double predicted = 0.0;
    double observed = 0.0;
    double residual = 0.0;
    AnomalyLabel label = AnomalyLabel::Ok;
    // True when the residual exceeds the warning threshold, independent of
    // the final label. SuspectedFailure takes precedence in `label` but the
    // model side of the verdict stays visible here.
    bool warning_condition = false;
    std::size_t neighbor_count = 0;
    std::size_t well_predicted_neighbors = 0;
};

struct AnomalyReport {
    AnomalyParams params;
    double residual_mean = 0.0;
    double residual_stdev = 0.0;
    double threshold = 0.0;
    bool self_analysis = false;
    std::vector<AnomalyVerdict> verdicts;

    std::size_t count(AnomalyLabel l) const {
        std::size_t n = 0;
        for (const auto& v : verdicts) n += v.label == l ? 1 : 0;
        return n;
    }

    // One verdict per line, then a summary object via summary_json().
    std::string to_jsonl() const {
        std::string out;
        for (const auto& v : verdicts) {
            nlohmann::json j{{"id", v.id},
                             {"predicted", v.predicted},
                             {"observed", v.observed},
                             {"residual", v.residual},
                             {"label", to_string(v.label)},
                             {"warning_condition", v.warning_condition},
                             {"neighbors", v.neighbor_count},
                             {"well_predicted_neighbors", v.well_predicted_neighbors}};
            out += j.dump();
            out += "\n";
        }
        return out;
    }

    nlohmann::json summary_json() const {
        return nlohmann::json{
            {"n", verdicts.size()},
            {"ok", count(AnomalyLabel::Ok)},
            {"warnings", count(AnomalyLabel::Warning)},
            {"outliers", count(AnomalyLabel::Outlier)},
            {"suspected_failures", count(AnomalyLabel::SuspectedFailure)},
            {"residual_mean", residual_mean},
            {"residual_stdev", residual_stdev},
            {"threshold", threshold},
            {"self_analysis", self_analysis},
            {"params",
             {{"n_sigma", params.n_sigma},
              {"hamming_h", params.hamming_h},
              {"min_neighbors", params.min_neighbors},
              {"min_time_seconds", params.min_time_seconds}}}};
    }
};

namespace anomaly_detail {

// Hamming distance over configuration inputs only; numeric values compare by
// exact equality.
inline int hamming(const Dataset& a, std::size_t ra, const Dataset& b,
                   std::size_t rb, const std::vector<std::size_t>& cols_a,
                   const std::vector<std::size_t>& cols_b) {
    int d = 0;
    for (std::size_t i = 0; i < cols_a.size(); ++i)
        d += field_equal(a.record(ra).fields[cols_a[i]],
                         b.record(rb).fields[cols_b[i]]) ? 0 : 1;
    return d;
}

}  // namespace anomaly_detail

// Model-based anomaly labeling. Residual statistics come from the reference
// rows; a target is a Warning when its residual exceeds mean + n_sigma*stdev,
// and a Warning is promoted to Outlier when it has at least min_neighbors
// reference rows within Hamming distance h and strictly more than half of
// them are well predicted. Any target shorter than min_time_seconds is a
// SuspectedFailure regardless of the model. Reference labels are computed in
// a first pass, so promotion never depends on target ordering.
inline AnomalyReport detect(const Predictor& p, const Dataset& reference_ds,
                            std::span<const std::size_t> reference,
                            const Dataset& target_ds,
                            std::span<const std::size_t> targets,
                            const AnomalyParams& params) {
    if (reference.empty())
        throw std::invalid_argument("detect: reference rows must be non-empty");
    if (params.n_sigma <= 0 || params.min_neighbors < 1 || params.hamming_h < 0)
        throw std::invalid_argument("detect: invalid parameters");

    const bool same_dataset = &reference_ds == &target_ds;

    std::vector<double> ref_pred = p.predict_rows(reference_ds, reference);
    double mean = 0.0;
    std::vector<double> ref_residual(reference.size());
    for (std::size_t i = 0; i < reference.size(); ++i) {
        ref_residual[i] = std::abs(reference_ds.exe_time(reference[i]) - ref_pred[i]);
        mean += ref_residual[i];
    }
    mean /= static_cast<double>(reference.size());
    double var = 0.0;
    for (double r : ref_residual) var += (r - mean) * (r - mean);
    var /= reference.size() > 1 ? static_cast<double>(reference.size() - 1) : 1.0;
    double stdev = std::sqrt(var);
    if (stdev == 0.0)
        throw std::domain_error(
            "detect: degenerate residual statistics (all reference residuals "
            "identical); anomaly thresholds are undefined");

    double threshold = mean + params.n_sigma * stdev;

    // phase 1: reference rows get their warning flag from the same threshold
    std::vector<bool> ref_warning(reference.size());
    for (std::size_t i = 0; i < reference.size(); ++i)
        ref_warning[i] = ref_residual[i] > threshold;

    std::vector<std::size_t> ref_cols, tgt_cols;
    for (std::size_t c : p.schema().input_indices()) {
        const std::string& name = p.schema().column(c).name;
        ref_cols.push_back(reference_ds.schema().require(name));
        tgt_cols.push_back(target_ds.schema().require(name));
    }

    AnomalyReport report;
    report.params = params;
    report.residual_mean = mean;
    report.residual_stdev = stdev;
    report.threshold = threshold;

    if (same_dataset) {
        for (std::size_t t : targets)
            for (std::size_t r : reference)
                if (t == r) {
                    report.self_analysis = true;
                    break;
                }
    }

    std::vector<double> tgt_pred = p.predict_rows(target_ds, targets);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        std::size_t row = targets[i];
        AnomalyVerdict v;
        v.id = target_ds.id(row);
        v.row = row;
        v.predicted = tgt_pred[i];
        v.observed = target_ds.exe_time(row);
        v.residual = std::abs(v.observed - v.predicted);
        v.warning_condition = v.residual > threshold;

        if (v.warning_condition) {
            for (std::size_t j = 0; j < reference.size(); ++j) {
                std::size_t ref_row = reference[j];
                if (same_dataset && ref_row == row) continue;  // never own neighbor
                if (anomaly_detail::hamming(target_ds, row, reference_ds, ref_row,
                                            tgt_cols, ref_cols) <= params.hamming_h) {
                    ++v.neighbor_count;
                    if (!ref_warning[j]) ++v.well_predicted_neighbors;
                }
            }
        }

        if (v.observed < params.min_time_seconds) {
            v.label = AnomalyLabel::SuspectedFailure;
        } else if (v.warning_condition) {
            bool enough = v.neighbor_count >=
                          static_cast<std::size_t>(params.min_neighbors);
            bool mostly_ok = 2 * v.well_predicted_neighbors > v.neighbor_count;
            v.label = enough && mostly_ok ? AnomalyLabel::Outlier
                                          : AnomalyLabel::Warning;
        }
        report.verdicts.push_back(std::move(v));
    }
    return report;
}

// Self-analysis over a whole dataset: the model explains the same rows it is
// scored against, the usual mode when auditing an existing repository.
inline AnomalyReport detect_self(const Predictor& p, const Dataset& ds,
                                 const AnomalyParams& params) {
    auto rows = ds.all_rows();
    return detect(p, ds, rows, ds, rows, params);
}

enum class FlagMode { OutliersOnly, WarningsAndOutliers, All };

struct ConfusionMatrix {
    // rows: manual label; columns: automatic flag
    std::size_t anomaly_flagged = 0;
    std::size_t anomaly_unflagged = 0;
    std::size_t legitimate_flagged = 0;
    std::size_t legitimate_unflagged = 0;

    std::string render_text() const {
        std::ostringstream os;
        os << "automatic ->\nmanual v      flagged   ok\n";
        os << "anomaly      " << std::setw(8) << anomaly_flagged << std::setw(8)
           << anomaly_unflagged << "\n";
        os << "legitimate   " << std::setw(8) << legitimate_flagged << std::setw(8)
           << legitimate_unflagged << "\n";
        return os.str();
    }
};

inline bool flagged_under(AnomalyLabel l, FlagMode mode) {
    switch (mode) {
        case FlagMode::OutliersOnly: return l == AnomalyLabel::Outlier;
        case FlagMode::WarningsAndOutliers:
            return l == AnomalyLabel::Outlier || l == AnomalyLabel::Warning;
        case FlagMode::All: return l != AnomalyLabel::Ok;
    }
    return false;
}

// labels: record id -> true when manually tagged anomalous.
inline ConfusionMatrix confusion(const AnomalyReport& report,
                                 const std::map<std::string, bool>& labels,
                                 FlagMode mode = FlagMode::WarningsAndOutliers) {
    std::map<std::string, const AnomalyVerdict*> by_id;
    for (const auto& v : report.verdicts) by_id[v.id] = &v;
    ConfusionMatrix m;
    for (const auto& [id, is_anomaly] : labels) {
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw std::invalid_argument("confusion: id '" + id +
                                        "' not present in the report");
        bool flagged = flagged_under(it->second->label, mode);
        if (is_anomaly)
            ++(flagged ? m.anomaly_flagged : m.anomaly_unflagged);
        else
            ++(flagged ? m.legitimate_flagged : m.legitimate_unflagged);
    }
    return m;
}

struct CleanRetrainResult {
    Dataset cleaned;
    Predictor retrained;
    ErrorSummary before;
    ErrorSummary after;
    std::size_t removed = 0;
};

// Removes Outlier-labeled rows (warnings stay), re-splits the cleaned data
// with the predictor's own seed and fractions, retrains the same family and
// hyperparameters, and reports validation error before and after.
inline CleanRetrainResult clean_retrain(const Dataset& ds, const Predictor& p,
                                        const AnomalyParams& params, Family family,
                                        const Hyperparams& hp) {
    AnomalyReport report = detect_self(p, ds, params);

    SplitIndices before_split =
        split(ds, p.meta().fractions, p.meta().seed);
    ErrorSummary before = evaluate_on(p, ds, before_split.validation);

    std::vector<ExecutionRecord> kept;
    std::size_t removed = 0;
    for (std::size_t r = 0; r < ds.size(); ++r) {
        if (report.verdicts[r].label == AnomalyLabel::Outlier) {
            ++removed;
            continue;
        }
        kept.push_back(ds.record(r));
    }
    if (kept.empty())
        throw std::runtime_error(
            "clean_retrain: every row was flagged; refusing to retrain on an "
            "empty set");

    Dataset cleaned(ds.schema(), std::move(kept), ds.provenance() + " [cleaned]");
    SplitIndices after_split =
        split(cleaned, p.meta().fractions, p.meta().seed);
    TrainingMeta meta = p.meta();
    Predictor retrained = train_family(cleaned, after_split.train, family, hp, meta);
    ErrorSummary after = evaluate_on(retrained, cleaned, after_split.validation);

    return CleanRetrainResult{std::move(cleaned), std::move(retrained), before,
                              after, removed};
}

}  // namespace benchcast
