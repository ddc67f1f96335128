#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "benchcast/dataset.hpp"
#include "benchcast/rng.hpp"
#include "benchcast/schema.hpp"

namespace benchcast {

// Multiplicative ground-truth cost model for one benchmark:
//   time = base * prod(categorical factors) * prod((x/ref)^exponent)
//        * prod(interaction factors)
// Every factor must be positive, so the truth is positive everywhere.
struct PowerTerm {
    double reference = 1.0;
    double exponent = 0.0;
};

struct Interaction {
    std::string col_a;
    std::string val_a;
    std::string col_b;
    std::string val_b;
    double factor = 1.0;
};

struct BenchmarkTruth {
    double base_seconds = 100.0;
    std::map<std::string, std::map<std::string, double>> categorical_factors;
    std::map<std::string, PowerTerm> power_terms;
    std::vector<Interaction> interactions;
};

struct GeneratorSpec {
    DatasetSchema schema;
    std::map<std::string, BenchmarkTruth> benchmarks;
    // Optional sampling restrictions; a column absent here samples over the
    // full schema value set (categorical) or uniform integers in bounds.
    std::map<std::string, std::vector<double>> numeric_levels;
    std::map<std::string, std::vector<std::string>> categorical_levels;
    double noise_sigma = 0.05;
    double inject_fraction = 0.0;
    double inject_multiplier = 5.0;
    std::uint64_t seed = 1;

    nlohmann::json to_json() const;
    static GeneratorSpec from_json(const nlohmann::json& j);
    static GeneratorSpec defaults();
};

struct SynthResult {
    Dataset dataset;
    std::vector<std::string> injected_ids;  // ids of anomaly-injected records
};

// Pre-noise time for one configuration under the spec's cost model.
inline double truth_seconds(const GeneratorSpec& spec, const DatasetSchema& schema,
                            const ExecutionRecord& rec) {
    auto bcol = schema.benchmark_index();
    if (!bcol)
        throw std::invalid_argument("synth: schema has no 'bench' column");
    const std::string& bench = rec.text(*bcol);
    auto it = spec.benchmarks.find(bench);
    if (it == spec.benchmarks.end())
        throw std::invalid_argument("synth: no ground truth for benchmark '" + bench +
                                    "'");
    const BenchmarkTruth& t = it->second;
    double time = t.base_seconds;
    for (const auto& [col, factors] : t.categorical_factors) {
        const std::string& value = rec.text(schema.require(col));
        auto f = factors.find(value);
        if (f != factors.end()) time *= f->second;
    }
    for (const auto& [col, term] : t.power_terms) {
        double x = rec.numeric(schema.require(col));
        time *= std::pow(x / term.reference, term.exponent);
    }
    for (const auto& ia : t.interactions) {
        if (rec.text(schema.require(ia.col_a)) == ia.val_a &&
            rec.text(schema.require(ia.col_b)) == ia.val_b)
            time *= ia.factor;
    }
    return time;
}

inline double truth_seconds(const GeneratorSpec& spec, const Dataset& ds,
                            std::size_t row) {
    return truth_seconds(spec, ds.schema(), ds.record(row));
}

// Draws n random configurations, applies the ground-truth cost model with
// lognormal multiplicative noise, and optionally multiplies a fixed fraction
// of the rows by the injection multiplier (recorded as anomalies).
// Deterministic for a fixed spec and seed.
inline SynthResult generate(const GeneratorSpec& spec, std::size_t n) {
    if (n < 1) throw std::invalid_argument("synth: n must be >= 1");
    if (spec.benchmarks.empty())
        throw std::invalid_argument("synth: spec has no benchmarks");
    if (spec.noise_sigma < 0 || spec.inject_fraction < 0 ||
        spec.inject_fraction > 1 || spec.inject_multiplier <= 0)
        throw std::invalid_argument("synth: invalid noise/injection parameters");
    const DatasetSchema& s = spec.schema;
    auto bcol = s.benchmark_index();
    if (!bcol) throw std::invalid_argument("synth: schema has no 'bench' column");

    std::vector<std::string> bench_names;
    for (const auto& [name, truth] : spec.benchmarks) {
        if (!s.allows_category(*bcol, name))
            throw std::invalid_argument("synth: benchmark '" + name +
                                        "' not allowed by schema");
        if (truth.base_seconds <= 0)
            throw std::invalid_argument("synth: base time must be positive");
        bench_names.push_back(name);
    }

    Rng rng(spec.seed);
    std::vector<ExecutionRecord> records;
    records.reserve(n);
    std::vector<double> truths(n);

    for (std::size_t i = 0; i < n; ++i) {
        ExecutionRecord rec;
        rec.fields.resize(s.size(), std::string{});
        for (std::size_t ci = 0; ci < s.size(); ++ci) {
            const ColumnSpec& col = s.column(ci);
            switch (col.kind) {
                case FieldKind::CategoricalInput: {
                    if (ci == *bcol) {
                        rec.fields[ci] = bench_names[rng.next_index(bench_names.size())];
                    } else if (auto lv = spec.categorical_levels.find(col.name);
                               lv != spec.categorical_levels.end()) {
                        rec.fields[ci] = lv->second[rng.next_index(lv->second.size())];
                    } else {
                        rec.fields[ci] = col.values[rng.next_index(col.values.size())];
                    }
                    break;
                }
                case FieldKind::NumericInput: {
                    if (auto lv = spec.numeric_levels.find(col.name);
                        lv != spec.numeric_levels.end()) {
                        rec.fields[ci] = lv->second[rng.next_index(lv->second.size())];
                    } else if (col.bounds) {
                        auto lo = static_cast<long long>(std::ceil(col.bounds->first));
                        auto hi = static_cast<long long>(std::floor(col.bounds->second));
                        rec.fields[ci] = static_cast<double>(
                            lo + static_cast<long long>(
                                     rng.next_index(static_cast<std::size_t>(hi - lo + 1))));
                    } else {
                        throw std::invalid_argument("synth: numeric column '" + col.name +
                                                    "' has neither levels nor bounds");
                    }
                    break;
                }
                case FieldKind::OutputTime:
                    break;  // filled below
                case FieldKind::Identity:
                    rec.fields[ci] = (ci == s.identity_index())
                                         ? std::to_string(i + 1)
                                         : std::string("1");
                    break;
                case FieldKind::Metadata:
                    rec.fields[ci] = (col.name == "validated" || col.name == "version")
                                         ? std::string("1")
                                         : std::string("");
                    break;
            }
        }
        double truth = truth_seconds(spec, s, rec);
        truths[i] = truth;
        double noise =
            spec.noise_sigma > 0 ? std::exp(spec.noise_sigma * rng.next_normal()) : 1.0;
        rec.fields[s.output_index()] = truth * noise;
        records.push_back(std::move(rec));
    }

    auto n_inject = static_cast<std::size_t>(
        std::llround(spec.inject_fraction * static_cast<double>(n)));
    std::vector<std::string> injected_ids;
    if (n_inject > 0) {
        Rng inject_rng(derive_seed(spec.seed, "inject"));
        auto picks = inject_rng.sample_without_replacement(n, n_inject);
        std::sort(picks.begin(), picks.end());
        for (std::size_t row : picks) {
            double v = std::get<double>(records[row].fields[s.output_index()]);
            records[row].fields[s.output_index()] = v * spec.inject_multiplier;
        }
        Dataset tmp(s, records, "synth");
        for (std::size_t row : picks) injected_ids.push_back(tmp.id(row));
        return SynthResult{std::move(tmp), std::move(injected_ids)};
    }

    return SynthResult{Dataset(s, std::move(records), "synth"), {}};
}

inline nlohmann::json GeneratorSpec::to_json() const {
    nlohmann::json jb;
    for (const auto& [name, t] : benchmarks) {
        nlohmann::json jt;
        jt["base_seconds"] = t.base_seconds;
        jt["categorical_factors"] = t.categorical_factors;
        nlohmann::json jp;
        for (const auto& [col, term] : t.power_terms)
            jp[col] = {{"reference", term.reference}, {"exponent", term.exponent}};
        jt["power_terms"] = jp;
        nlohmann::json ji = nlohmann::json::array();
        for (const auto& ia : t.interactions)
            ji.push_back({{"col_a", ia.col_a},
                          {"val_a", ia.val_a},
                          {"col_b", ia.col_b},
                          {"val_b", ia.val_b},
                          {"factor", ia.factor}});
        jt["interactions"] = ji;
        jb[name] = jt;
    }
    return nlohmann::json{{"schema", schema.to_json()},
                          {"benchmarks", jb},
                          {"numeric_levels", numeric_levels},
                          {"categorical_levels", categorical_levels},
                          {"noise_sigma", noise_sigma},
                          {"inject_fraction", inject_fraction},
                          {"inject_multiplier", inject_multiplier},
                          {"seed", seed}};
}

inline GeneratorSpec GeneratorSpec::from_json(const nlohmann::json& j) {
    GeneratorSpec spec;
    spec.schema = DatasetSchema::from_json(j.at("schema"));
    for (const auto& [name, jt] : j.at("benchmarks").items()) {
        BenchmarkTruth t;
        t.base_seconds = jt.at("base_seconds").get<double>();
        if (jt.contains("categorical_factors"))
            t.categorical_factors =
                jt["categorical_factors"]
                    .get<std::map<std::string, std::map<std::string, double>>>();
        if (jt.contains("power_terms")) {
            for (const auto& [col, jp] : jt["power_terms"].items())
                t.power_terms[col] = {jp.at("reference").get<double>(),
                                      jp.at("exponent").get<double>()};
        }
        if (jt.contains("interactions")) {
            for (const auto& ji : jt["interactions"])
                t.interactions.push_back({ji.at("col_a").get<std::string>(),
                                          ji.at("val_a").get<std::string>(),
                                          ji.at("col_b").get<std::string>(),
                                          ji.at("val_b").get<std::string>(),
                                          ji.at("factor").get<double>()});
        }
        spec.benchmarks[name] = std::move(t);
    }
    if (j.contains("numeric_levels"))
        spec.numeric_levels =
            j["numeric_levels"].get<std::map<std::string, std::vector<double>>>();
    if (j.contains("categorical_levels"))
        spec.categorical_levels =
            j["categorical_levels"]
                .get<std::map<std::string, std::vector<std::string>>>();
    spec.noise_sigma = j.value("noise_sigma", 0.05);
    spec.inject_fraction = j.value("inject_fraction", 0.0);
    spec.inject_multiplier = j.value("inject_multiplier", 5.0);
    spec.seed = j.value("seed", std::uint64_t{1});
    return spec;
}

// Stock two-benchmark spec: an I/O-bound workload whose time is dominated by
// disk and network (with a disk*net interaction), and a CPU-bound workload
// dominated by parallelism. Sampling is restricted to a small design so that
// identical configurations recur, as they do in real benchmarking sweeps.
inline GeneratorSpec GeneratorSpec::defaults() {
    GeneratorSpec spec;
    std::vector<ColumnSpec> cols;
    auto cat = [&](std::string name, std::vector<std::string> values) {
        cols.push_back({std::move(name), FieldKind::CategoricalInput,
                        std::move(values), std::nullopt});
    };
    auto num = [&](std::string name, double lo, double hi) {
        cols.push_back(
            {std::move(name), FieldKind::NumericInput, {}, std::make_pair(lo, hi)});
    };
    cols.push_back({"id_exec", FieldKind::Identity, {}, std::nullopt});
    cols.push_back({"id_cl", FieldKind::Identity, {}, std::nullopt});
    cat("bench", {"sortlike", "cpulike"});
    cols.push_back({"exe_time", FieldKind::OutputTime, {}, std::nullopt});
    cat("net", {"ETH", "IB"});
    cat("disk", {"SSD", "HDD"});
    num("maps", 2, 32);
    num("iosf", 1, 100);
    num("replicas", 1, 3);
    num("iofilebuf", 1024, 262144);
    cat("compression", {"None", "ZLIB"});
    num("blk_size", 32, 256);
    num("datanodes", 1, 64);
    num("vm_cores", 1, 64);
    num("vm_ram", 1, 256);
    cols.push_back({"validated", FieldKind::Metadata, {}, std::nullopt});
    cols.push_back({"version", FieldKind::Metadata, {}, std::nullopt});
    spec.schema = DatasetSchema(std::move(cols));

    spec.numeric_levels = {
        {"maps", {4, 8, 16}},      {"iosf", {10}},
        {"replicas", {1}},         {"iofilebuf", {65536, 131072}},
        {"blk_size", {64, 128}},   {"datanodes", {4, 8}},
        {"vm_cores", {8}},         {"vm_ram", {64}},
    };

    BenchmarkTruth io;
    io.base_seconds = 340.0;
    io.categorical_factors = {
        {"disk", {{"SSD", 1.0}, {"HDD", 1.55}}},
        {"net", {{"ETH", 1.30}, {"IB", 1.0}}},
        {"compression", {{"None", 1.0}, {"ZLIB", 1.15}}},
    };
    io.power_terms = {
        {"maps", {8.0, -0.18}},
        {"iofilebuf", {65536.0, -0.05}},
        {"blk_size", {64.0, -0.07}},
        {"datanodes", {4.0, -0.25}},
    };
    io.interactions = {{"disk", "HDD", "net", "ETH", 1.18}};
    spec.benchmarks["sortlike"] = std::move(io);

    BenchmarkTruth cpu;
    cpu.base_seconds = 560.0;
    cpu.categorical_factors = {
        {"disk", {{"SSD", 1.0}, {"HDD", 1.10}}},
        {"net", {{"ETH", 1.07}, {"IB", 1.0}}},
        {"compression", {{"None", 1.0}, {"ZLIB", 0.90}}},
    };
    cpu.power_terms = {
        {"maps", {8.0, -0.35}},
        {"blk_size", {64.0, 0.05}},
        {"datanodes", {4.0, -0.35}},
    };
    spec.benchmarks["cpulike"] = std::move(cpu);
    return spec;
}

}  // namespace benchcast
