#pragma once

#include <chrono>
#include <iomanip>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "benchcast/dataset.hpp"
#include "benchcast/metrics.hpp"
#include "benchcast/predictor.hpp"

namespace benchcast {

enum class Objective { Mae, Rae };

inline std::string to_string(Objective o) {
    return o == Objective::Mae ? "mae" : "rae";
}

struct SearchSpec {
    Family family = Family::Tree;
    std::vector<Hyperparams> grid;
    SplitIndices split;
    Objective objective = Objective::Rae;
    bool include_unvalidated = false;
    std::uint64_t train_seed = 1;            // drives seeded learners (neural net)
    std::string benchmark_tag = "general";   // recorded in the trained model
};

struct CandidateResult {
    Hyperparams hp;
    ErrorSummary validation;
    double objective_value = 0.0;
    double wall_seconds = 0.0;
};

struct SelectionReport {
    Family family = Family::Tree;
    Objective objective = Objective::Rae;
    std::size_t best_index = 0;
    Hyperparams best;
    ErrorSummary validation;  // of the best candidate
    ErrorSummary test;        // of the best candidate, retrained on train rows
    std::vector<CandidateResult> candidates;

    // Timings vary run to run; primary report files omit them so identical
    // inputs produce identical bytes.
    nlohmann::json to_json(bool include_timings = false) const {
        nlohmann::json jc = nlohmann::json::array();
        for (const auto& c : candidates) {
            nlohmann::json j{{"hyperparameters", c.hp},
                             {"validation_mae", c.validation.mae},
                             {"validation_rae", c.validation.rae},
                             {"objective", c.objective_value}};
            if (include_timings) j["wall_seconds"] = c.wall_seconds;
            jc.push_back(j);
        }
        return nlohmann::json{
            {"family", to_string(family)},
            {"objective", to_string(objective)},
            {"best_index", best_index},
            {"best_hyperparameters", best},
            {"validation", {{"mae", validation.mae}, {"rae", validation.rae}, {"n", validation.n}}},
            {"test", {{"mae", test.mae}, {"rae", test.rae}, {"n", test.n}}},
            {"candidates", jc}};
    }

    std::string render_text() const {
        std::ostringstream os;
        os << "family: " << to_string(family) << "   objective: "
           << to_string(objective) << "\n";
        os << std::left << std::setw(36) << "candidate" << std::right
           << std::setw(12) << "val MAE" << std::setw(12) << "val RAE"
           << std::setw(12) << "wall s" << "\n";
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const auto& c = candidates[i];
            std::ostringstream hp;
            for (auto it = c.hp.begin(); it != c.hp.end(); ++it) {
                if (it != c.hp.begin()) hp << ",";
                hp << it->first << "=" << it->second;
            }
            os << std::left << std::setw(36)
               << ((i == best_index ? "* " : "  ") + hp.str()) << std::right
               << std::fixed << std::setprecision(5) << std::setw(12)
               << c.validation.mae << std::setw(12) << c.validation.rae
               << std::setw(12) << std::setprecision(3) << c.wall_seconds << "\n";
        }
        os << "test: MAE " << std::setprecision(5) << test.mae << "  RAE "
           << test.rae << "  (n=" << test.n << ")\n";
        return os.str();
    }
};

inline ErrorSummary evaluate_on(const Predictor& p, const Dataset& ds,
                                std::span<const std::size_t> rows) {
    std::vector<double> pred = p.predict_rows(ds, rows);
    std::vector<double> obs(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) obs[i] = ds.exe_time(rows[i]);
    return error_summary(pred, obs);
}

// Published sweep per family; the neural net ships one pre-tuned
// configuration rather than a sweep; tuning it per run is too slow for a default.
inline std::vector<Hyperparams> default_grid(Family family) {
    switch (family) {
        case Family::Tree:
            return {{{"min_instances", 1}},
                    {{"min_instances", 2}},
                    {{"min_instances", 4}},
                    {{"min_instances", 8}}};
        case Family::Knn:
            return {{{"k", 1}}, {{"k", 3}}, {{"k", 5}}};
        case Family::NeuralNet:
            return {{{"hidden", 300}, {"lr", 0.2}, {"max_iter", 1000}}};
        case Family::Polynomial:
            return {{{"degree", 1}}, {{"degree", 2}}, {{"degree", 3}}};
    }
    return {};
}

// Trains every candidate on the train rows, scores it on the validation
// rows, then retrains the winner on the train rows and touches the test rows
// exactly once for the final summary. Ties keep the earliest candidate.
inline SelectionReport grid_search(const Dataset& ds, const SearchSpec& spec) {
    if (spec.grid.empty())
        throw std::invalid_argument("grid_search: empty candidate grid");
    if (spec.split.train.empty() || spec.split.validation.empty() ||
        spec.split.test.empty())
        throw std::invalid_argument("grid_search: degenerate split");

    std::vector<std::size_t> train_rows =
        spec.include_unvalidated ? spec.split.train
                                 : ds.validated_rows(spec.split.train);
    if (train_rows.empty())
        throw std::invalid_argument("grid_search: no eligible training rows");

    TrainingMeta meta;
    meta.seed = spec.train_seed;
    meta.fractions = spec.split.fractions;
    meta.benchmark = spec.benchmark_tag;

    SelectionReport report;
    report.family = spec.family;
    report.objective = spec.objective;

    for (const auto& hp : spec.grid) {
        auto t0 = std::chrono::steady_clock::now();
        Predictor p = train_family(ds, train_rows, spec.family, hp, meta);
        ErrorSummary val = evaluate_on(p, ds, spec.split.validation);
        auto t1 = std::chrono::steady_clock::now();
        CandidateResult c;
        c.hp = hp;
        c.validation = val;
        c.objective_value = spec.objective == Objective::Mae ? val.mae : val.rae;
        c.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
        report.candidates.push_back(std::move(c));
    }

    report.best_index = 0;
    for (std::size_t i = 1; i < report.candidates.size(); ++i)
        if (report.candidates[i].objective_value <
            report.candidates[report.best_index].objective_value)
            report.best_index = i;

    report.best = report.candidates[report.best_index].hp;
    report.validation = report.candidates[report.best_index].validation;

    Predictor final_model = train_family(ds, train_rows, spec.family, report.best, meta);
    report.test = evaluate_on(final_model, ds, spec.split.test);
    return report;
}

// Same as grid_search but also hands back the retrained winner.
inline std::pair<SelectionReport, Predictor> grid_search_with_model(
    const Dataset& ds, const SearchSpec& spec) {
    SelectionReport report = grid_search(ds, spec);
    std::vector<std::size_t> train_rows =
        spec.include_unvalidated ? spec.split.train
                                 : ds.validated_rows(spec.split.train);
    TrainingMeta meta;
    meta.seed = spec.train_seed;
    meta.fractions = spec.split.fractions;
    meta.benchmark = spec.benchmark_tag;
    Predictor model = train_family(ds, train_rows, spec.family, report.best, meta);
    return {std::move(report), std::move(model)};
}

struct BenchmarkComparison {
    std::string benchmark;
    double general_rae = 0.0;
    double specific_rae = 0.0;
    std::size_t n_test = 0;
    bool skipped = false;
    std::string note;
};

// One general model over every benchmark's train rows versus one specific
// model per benchmark, both scored on that benchmark's test rows. Split
// seeds derive from the benchmark name so the comparison is reproducible
// regardless of which benchmarks are present.
inline std::vector<BenchmarkComparison> compare_general_specific(
    const Dataset& ds, Family family, const Hyperparams& hp,
    std::array<double, 3> fractions, std::uint64_t seed,
    std::size_t min_rows_per_benchmark = 8, bool include_unvalidated = false) {
    std::vector<std::string> benches = benchmarks_present(ds);
    if (benches.empty())
        throw std::invalid_argument("compare_general_specific: no benchmark column");

    auto bcol = *ds.schema().benchmark_index();
    std::vector<BenchmarkComparison> out;
    std::vector<std::vector<std::size_t>> train_sets, test_sets;
    std::vector<std::size_t> general_train;

    for (const auto& bench : benches) {
        BenchmarkComparison cmp;
        cmp.benchmark = bench;
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < ds.size(); ++r)
            if (ds.record(r).text(bcol) == bench) rows.push_back(r);
        if (rows.size() < min_rows_per_benchmark) {
            cmp.skipped = true;
            cmp.note = "only " + std::to_string(rows.size()) +
                       " rows; need " + std::to_string(min_rows_per_benchmark);
            out.push_back(std::move(cmp));
            train_sets.emplace_back();
            test_sets.emplace_back();
            continue;
        }
        SplitIndices si =
            split_rows(rows, fractions, derive_seed(seed, "bench", fnv1a64(bench)));
        std::vector<std::size_t> train =
            include_unvalidated ? si.train : ds.validated_rows(si.train);
        general_train.insert(general_train.end(), train.begin(), train.end());
        train_sets.push_back(std::move(train));
        test_sets.push_back(si.test);
        out.push_back(std::move(cmp));
    }

    if (general_train.empty())
        throw std::invalid_argument(
            "compare_general_specific: every benchmark was skipped");
    std::sort(general_train.begin(), general_train.end());

    TrainingMeta meta;
    meta.seed = seed;
    meta.fractions = fractions;
    meta.benchmark = "general";
    Predictor general = train_family(ds, general_train, family, hp, meta);

    for (std::size_t b = 0; b < benches.size(); ++b) {
        if (out[b].skipped) continue;
        TrainingMeta smeta = meta;
        smeta.benchmark = benches[b];
        Predictor specific = train_family(ds, train_sets[b], family, hp, smeta);
        out[b].general_rae = evaluate_on(general, ds, test_sets[b]).rae;
        out[b].specific_rae = evaluate_on(specific, ds, test_sets[b]).rae;
        out[b].n_test = test_sets[b].size();
    }
    return out;
}

}  // namespace benchcast
