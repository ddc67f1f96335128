// benchcast command-line interface: reproducible pipelines over benchmark
// execution data. Every subcommand writes one manifest next to its outputs.
//
// Exit codes: 0 success, 1 data/quality findings, 2 usage or input errors.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <benchcast/anomaly.hpp>
#include <benchcast/dataset.hpp>
#include <benchcast/manifest.hpp>
#include <benchcast/predictor.hpp>
#include <benchcast/rank.hpp>
#include <benchcast/recommend.hpp>
#include <benchcast/selection.hpp>
#include <benchcast/synth.hpp>

namespace fs = std::filesystem;
using namespace benchcast;

namespace {

nlohmann::json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    return j;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

DatasetSchema load_schema_arg(const std::string& schema_path) {
    if (schema_path.empty()) return DatasetSchema::stock();
    return DatasetSchema::from_json(read_json_file(schema_path));
}

std::array<double, 3> parse_split(const std::string& text) {
    std::array<double, 3> out{};
    std::stringstream ss(text);
    std::string cell;
    for (int i = 0; i < 3; ++i) {
        if (!std::getline(ss, cell, ','))
            throw std::invalid_argument("--split expects three comma-separated fractions");
        out[static_cast<std::size_t>(i)] = std::stod(cell);
    }
    if (std::getline(ss, cell, ','))
        throw std::invalid_argument("--split expects exactly three fractions");
    return out;
}

struct KRange {
    int from = 10, to = 60, step = 10;
};

KRange parse_krange(const std::string& text) {
    KRange r;
    if (std::sscanf(text.c_str(), "%d:%d:%d", &r.from, &r.to, &r.step) != 3)
        throw std::invalid_argument("--k-range expects from:to:step");
    return r;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stoul(cell));
    if (out.empty()) throw std::invalid_argument("size list is empty");
    return out;
}

void validate_hp(Family family, const std::string& key, double value) {
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("--grid: " + why);
    };
    switch (family) {
        case Family::Tree:
            if (key != "min_instances") fail("unknown tree parameter '" + key + "'");
            if (value < 1) fail("min_instances must be >= 1");
            break;
        case Family::Knn:
            if (key != "k") fail("unknown knn parameter '" + key + "'");
            if (value < 1) fail("k must be >= 1");
            break;
        case Family::NeuralNet:
            if (key != "hidden" && key != "lr" && key != "max_iter")
                fail("unknown neural-net parameter '" + key + "'");
            if (key == "hidden" && value < 1) fail("hidden must be >= 1");
            if (key == "lr" && value <= 0) fail("lr must be > 0");
            if (key == "max_iter" && value < 1) fail("max_iter must be >= 1");
            break;
        case Family::Polynomial:
            if (key != "degree") fail("unknown polynomial parameter '" + key + "'");
            if (value != 1 && value != 2 && value != 3)
                fail("degree must be 1, 2 or 3");
            break;
    }
}

// "k=1,3,5" or "hidden=20;lr=0.1" -> cross product of per-key value lists.
std::vector<Hyperparams> parse_grid(const std::string& text, Family family) {
    if (text.empty()) return default_grid(family);
    std::vector<Hyperparams> grid{{}};
    std::stringstream groups(text);
    std::string group;
    while (std::getline(groups, group, ';')) {
        auto eq = group.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--grid entries look like key=v1,v2");
        std::string key = group.substr(0, eq);
        std::vector<double> values;
        std::stringstream vals(group.substr(eq + 1));
        std::string cell;
        while (std::getline(vals, cell, ',')) {
            double v = std::stod(cell);
            validate_hp(family, key, v);
            values.push_back(v);
        }
        if (values.empty())
            throw std::invalid_argument("--grid: no values for '" + key + "'");
        std::vector<Hyperparams> expanded;
        for (const auto& hp : grid)
            for (double v : values) {
                Hyperparams next = hp;
                next[key] = v;
                expanded.push_back(std::move(next));
            }
        grid = std::move(expanded);
    }
    return grid;
}

Hyperparams parse_single_hp(const std::string& text, Family family) {
    auto grid = parse_grid(text, family);
    if (grid.size() != 1)
        throw std::invalid_argument("--hp expects a single value per parameter");
    return grid[0];
}

void notice_row_errors(const LoadResult& res) {
    for (const auto& e : res.row_errors)
        std::cerr << "notice: line " << e.line << ": " << e.message << "\n";
    if (!res.row_errors.empty())
        std::cerr << "notice: " << res.row_errors.size()
                  << " malformed rows excluded\n";
}

fs::path strip_ext(const fs::path& p) {
    fs::path q = p;
    q.replace_extension();
    return q;
}

// ---------------------------------------------------------------- ingest --

struct IngestArgs {
    std::string csv, schema, out;
};

int run_ingest(const IngestArgs& a) {
    DatasetSchema schema = load_schema_arg(a.schema);
    fs::path prefix = a.out.empty() ? strip_ext(a.csv).concat(".ingest") : fs::path(a.out);

    // Accept the full layout or any input-covering subset (configuration
    // files produced by `recommend` carry no ids or observed times).
    LoadResult res;
    std::string mode = "full";
    try {
        res = load_csv(a.csv, schema);
    } catch (const std::runtime_error&) {
        res = load_config_csv(a.csv, schema);
        mode = "config";
    }

    std::cout << res.dataset.size() << " records loaded\n";
    for (const auto& e : res.row_errors)
        std::cout << "line " << e.line << ": " << e.message << "\n";

    nlohmann::json report{{"records", res.dataset.size()},
                          {"mode", mode},
                          {"row_errors", nlohmann::json::array()}};
    for (const auto& e : res.row_errors)
        report["row_errors"].push_back({{"line", e.line}, {"message", e.message}});
    fs::path report_path = fs::path(prefix).concat(".report.json");
    write_text_file(report_path, report.dump(2) + "\n");

    RunManifest manifest;
    manifest.command = "ingest";
    manifest.parameters = {{"csv", a.csv}, {"schema", a.schema}, {"mode", mode}};
    manifest.inputs = {a.csv};
    if (!a.schema.empty()) manifest.inputs.push_back(a.schema);
    manifest.outputs = {report_path};
    manifest.write(fs::path(prefix).concat(".manifest.json"));

    return res.row_errors.empty() ? 0 : 1;
}

// ----------------------------------------------------------------- train --

struct TrainArgs {
    std::string csv, schema, family = "tree", grid, split = "0.5,0.25,0.25";
    std::string bench = "general", out = "model.json";
    std::uint64_t seed = 1;
    bool include_unvalidated = false;
};

int run_train(const TrainArgs& a) {
    Family family = family_from_string(a.family);
    std::vector<Hyperparams> grid = parse_grid(a.grid, family);
    std::array<double, 3> fractions = parse_split(a.split);

    DatasetSchema schema = load_schema_arg(a.schema);
    LoadResult res = load_csv(a.csv, schema);
    notice_row_errors(res);
    Dataset ds = a.bench == "general" ? std::move(res.dataset)
                                      : filter_benchmark(res.dataset, a.bench);
    if (ds.empty()) throw std::runtime_error("train: no usable records");

    SearchSpec spec;
    spec.family = family;
    spec.grid = std::move(grid);
    spec.split = split(ds, fractions, a.seed);
    spec.include_unvalidated = a.include_unvalidated;
    spec.train_seed = a.seed;
    spec.benchmark_tag = a.bench;

    auto [report, model] = grid_search_with_model(ds, spec);
    std::cout << report.render_text();

    fs::path model_path = a.out;
    save_model(model, model_path);
    fs::path prefix = strip_ext(model_path);
    fs::path selection_path = fs::path(prefix).concat(".selection.json");
    write_text_file(selection_path, report.to_json(false).dump(2) + "\n");

    RunManifest manifest;
    manifest.command = "train";
    manifest.parameters = {{"csv", a.csv},     {"schema", a.schema},
                           {"family", a.family}, {"grid", a.grid},
                           {"split", a.split}, {"bench", a.bench},
                           {"out", a.out},
                           {"include_unvalidated", a.include_unvalidated ? "1" : "0"}};
    manifest.seed = a.seed;
    manifest.inputs = {a.csv};
    if (!a.schema.empty()) manifest.inputs.push_back(a.schema);
    manifest.outputs = {model_path, selection_path};
    manifest.write(fs::path(prefix).concat(".manifest.json"));
    return 0;
}

// --------------------------------------------------------------- predict --

struct PredictArgs {
    std::string model, csv, out = "predictions.csv";
};

int run_predict(const PredictArgs& a) {
    Predictor model = load_model(a.model);
    LoadResult res = load_config_csv(a.csv, model.schema());
    if (!res.row_errors.empty()) {
        notice_row_errors(res);
        throw std::runtime_error(
            "predict: input rows failed validation; run ingest for details");
    }
    const Dataset& ds = res.dataset;

    std::size_t clamped = 0, unknown = 0;
    std::ostringstream csv;
    const DatasetSchema& s = ds.schema();
    for (std::size_t i = 0; i < s.size(); ++i)
        csv << (i ? "," : "") << s.column(i).name;
    csv << ",predicted_seconds\n";
    for (std::size_t r = 0; r < ds.size(); ++r) {
        PredictDetail d = model.predict_detail(ds, r);
        clamped += d.clamped ? 1 : 0;
        unknown += d.unknown_categories;
        for (std::size_t i = 0; i < s.size(); ++i)
            csv << (i ? "," : "") << field_to_string(ds.record(r).fields[i]);
        csv << "," << field_to_string(d.value) << "\n";
    }
    write_text_file(a.out, csv.str());
    std::cout << ds.size() << " predictions written to " << a.out << "\n";
    if (clamped > 0)
        std::cerr << "notice: " << clamped << " negative predictions clamped to 0\n";
    if (unknown > 0)
        std::cerr << "notice: " << unknown
                  << " unknown category values encoded as all-zero groups\n";

    RunManifest manifest;
    manifest.command = "predict";
    manifest.parameters = {{"model", a.model}, {"csv", a.csv}, {"out", a.out}};
    manifest.inputs = {a.model, a.csv};
    manifest.outputs = {a.out};
    manifest.write(strip_ext(a.out).concat(".manifest.json"));
    return 0;
}

// ---------------------------------------------------------------- detect --

struct DetectArgs {
    std::string model, csv, out = "anomalies", pairs_csv;
    double n_sigma = 3.0;
    int hamming = 0;
    int min_neighbors = 2;
    double min_time = 60.0;
};

int run_detect(const DetectArgs& a) {
    Predictor model = load_model(a.model);
    LoadResult res = load_csv(a.csv, model.schema());
    notice_row_errors(res);
    if (res.dataset.empty()) throw std::runtime_error("detect: no usable records");

    AnomalyParams params;
    params.n_sigma = a.n_sigma;
    params.hamming_h = a.hamming;
    params.min_neighbors = a.min_neighbors;
    params.min_time_seconds = a.min_time;

    AnomalyReport report = detect_self(model, res.dataset, params);

    fs::path jsonl_path = fs::path(a.out).concat(".jsonl");
    fs::path summary_path = fs::path(a.out).concat(".summary.json");
    write_text_file(jsonl_path, report.to_jsonl());
    write_text_file(summary_path, report.summary_json().dump(2) + "\n");

    std::cout << "records: " << report.verdicts.size() << "\n"
              << "ok: " << report.count(AnomalyLabel::Ok) << "\n"
              << "warnings: " << report.count(AnomalyLabel::Warning) << "\n"
              << "outliers: " << report.count(AnomalyLabel::Outlier) << "\n"
              << "suspected failures: "
              << report.count(AnomalyLabel::SuspectedFailure) << "\n";

    RunManifest manifest;
    manifest.command = "detect";
    manifest.parameters = {{"model", a.model},
                           {"csv", a.csv},
                           {"n", field_to_string(a.n_sigma)},
                           {"h", std::to_string(a.hamming)},
                           {"min_neighbors", std::to_string(a.min_neighbors)},
                           {"min_time", field_to_string(a.min_time)},
                           {"out", a.out}};
    manifest.inputs = {a.model, a.csv};
    manifest.outputs = {jsonl_path, summary_path};

    if (!a.pairs_csv.empty()) {
        std::ostringstream pairs;
        pairs << "id,observed,predicted,residual,label\n";
        for (const auto& v : report.verdicts)
            pairs << v.id << "," << field_to_string(v.observed) << ","
                  << field_to_string(v.predicted) << ","
                  << field_to_string(v.residual) << "," << to_string(v.label)
                  << "\n";
        write_text_file(a.pairs_csv, pairs.str());
        manifest.outputs.push_back(a.pairs_csv);
    }
    manifest.write(fs::path(a.out).concat(".manifest.json"));

    std::size_t flags = report.verdicts.size() - report.count(AnomalyLabel::Ok);
    return flags > 0 ? 1 : 0;
}

// ------------------------------------------------------------- recommend --

struct RecommendArgs {
    std::string csv, schema, k_range = "10:60:10", family = "tree", hp;
    std::string out = "recommend", curve_sizes;
    double cost_per_hour = 6.85;
    std::uint64_t seed = 1;
    int trials = 10;
};

int run_recommend(const RecommendArgs& a) {
    Family family = family_from_string(a.family);
    Hyperparams hp = a.hp.empty() ? Hyperparams{} : parse_single_hp(a.hp, family);
    KRange kr = parse_krange(a.k_range);

    DatasetSchema schema = load_schema_arg(a.schema);
    LoadResult res = load_csv(a.csv, schema);
    notice_row_errors(res);
    const Dataset& ds = res.dataset;
    if (ds.empty()) throw std::runtime_error("recommend: no usable records");

    KSweep sweep =
        k_sweep(ds, kr.from, kr.to, kr.step, family, hp, a.seed, a.cost_per_hour);

    fs::path sweep_path = fs::path(a.out).concat(".ksweep.json");
    write_text_file(sweep_path, sweep.to_json(ds).dump(2) + "\n");

    std::cout << "k    cost($)      RAE\n";
    for (const auto& plan : sweep.plans)
        std::cout << std::left << std::setw(5) << plan.k << std::fixed
                  << std::setprecision(2) << std::setw(12) << plan.estimated_cost
                  << std::setprecision(5) << plan.retrained_error.rae << "\n";
    std::cout << "full-data reference RAE: " << std::fixed << std::setprecision(5)
              << sweep.reference_error.rae << "\n";

    // runnable configuration file: union of the sweep's representatives,
    // repeated configurations emitted once, ids and observed times dropped
    std::vector<std::size_t> union_rows;
    for (const auto& plan : sweep.plans)
        for (std::size_t r : plan.representative_rows)
            if (std::find(union_rows.begin(), union_rows.end(), r) ==
                union_rows.end())
                union_rows.push_back(r);

    const DatasetSchema& s = ds.schema();
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < s.size(); ++c) {
        FieldKind k = s.column(c).kind;
        if (k == FieldKind::OutputTime || k == FieldKind::Identity) continue;
        keep.push_back(c);
    }
    std::ostringstream plan_csv;
    for (std::size_t i = 0; i < keep.size(); ++i)
        plan_csv << (i ? "," : "") << s.column(keep[i]).name;
    plan_csv << "\n";
    for (std::size_t r : union_rows) {
        for (std::size_t i = 0; i < keep.size(); ++i)
            plan_csv << (i ? "," : "")
                     << field_to_string(ds.record(r).fields[keep[i]]);
        plan_csv << "\n";
    }
    fs::path plan_path = fs::path(a.out).concat(".plan.csv");
    write_text_file(plan_path, plan_csv.str());
    std::cout << union_rows.size() << " recommended executions written to "
              << plan_path.string() << "\n";

    RunManifest manifest;
    manifest.command = "recommend";
    manifest.parameters = {{"csv", a.csv},
                           {"schema", a.schema},
                           {"k_range", a.k_range},
                           {"family", a.family},
                           {"hp", a.hp},
                           {"cost_per_hour", field_to_string(a.cost_per_hour)},
                           {"curve", a.curve_sizes},
                           {"trials", std::to_string(a.trials)},
                           {"out", a.out}};
    manifest.seed = a.seed;
    manifest.inputs = {a.csv};
    if (!a.schema.empty()) manifest.inputs.push_back(a.schema);
    manifest.outputs = {sweep_path, plan_path};

    if (!a.curve_sizes.empty()) {
        std::vector<std::size_t> sizes = parse_sizes(a.curve_sizes);
        std::ostringstream curve_csv;
        curve_csv << "size,median_rae,strategy\n";
        for (auto strategy :
             {SelectionStrategy::Recommended, SelectionStrategy::Random}) {
            auto curve =
                learning_curve(ds, strategy, sizes, family, hp, a.seed, a.trials);
            for (const auto& pt : curve)
                curve_csv << pt.size << "," << field_to_string(pt.median_rae) << ","
                          << to_string(strategy) << "\n";
        }
        fs::path curve_path = fs::path(a.out).concat(".curve.csv");
        write_text_file(curve_path, curve_csv.str());
        manifest.outputs.push_back(curve_path);
    }
    manifest.write(fs::path(a.out).concat(".manifest.json"));
    return 0;
}

// ------------------------------------------------------------------ rank --

struct RankArgs {
    std::string model, space, method = "least-splits", out = "rank";
    std::size_t cap = 1000000;
    int classes = 4;
};

int run_rank(const RankArgs& a) {
    Predictor model = load_model(a.model);
    ConfigSpace space = ConfigSpace::from_json(read_json_file(a.space), model.schema());
    RankedTable table = unfold(model, space, a.cap);

    fs::path table_path = fs::path(a.out).concat(".table.csv");
    write_text_file(table_path, table.to_csv());

    RunManifest manifest;
    manifest.command = "rank";
    manifest.parameters = {{"model", a.model},
                           {"space", a.space},
                           {"method", a.method},
                           {"cap", std::to_string(a.cap)},
                           {"classes", std::to_string(a.classes)},
                           {"out", a.out}};
    manifest.inputs = {a.model, a.space};
    manifest.outputs = {table_path};

    if (a.method == "least-splits") {
        RankTree tree = least_splits(table);
        std::string text = render_rank_tree(tree);
        std::cout << text;
        fs::path text_path = fs::path(a.out).concat(".tree.txt");
        fs::path json_path = fs::path(a.out).concat(".tree.json");
        write_text_file(text_path, text);
        write_text_file(json_path, rank_tree_json(tree).dump(2) + "\n");
        manifest.outputs.push_back(text_path);
        manifest.outputs.push_back(json_path);
    } else if (a.method == "gini") {
        auto scores = gini_rank(table, a.classes);
        std::ostringstream csv;
        csv << "variable,gini_score\n";
        for (const auto& [var, score] : scores) {
            csv << var << "," << field_to_string(score) << "\n";
            std::cout << var << "  " << field_to_string(score) << "\n";
        }
        fs::path gini_path = fs::path(a.out).concat(".gini.csv");
        write_text_file(gini_path, csv.str());
        manifest.outputs.push_back(gini_path);
    } else {
        throw std::invalid_argument("--method must be least-splits or gini");
    }
    manifest.write(fs::path(a.out).concat(".manifest.json"));
    return 0;
}

// ----------------------------------------------------------------- synth --

struct SynthArgs {
    std::string spec, out = "synth";
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

int run_synth(const SynthArgs& a) {
    GeneratorSpec spec = a.spec.empty()
                             ? GeneratorSpec::defaults()
                             : GeneratorSpec::from_json(read_json_file(a.spec));
    if (a.seed_given) spec.seed = a.seed;

    SynthResult res = generate(spec, a.n);

    fs::path csv_path = fs::path(a.out).concat(".csv");
    save_csv(res.dataset, csv_path);

    std::ostringstream truth_csv;
    truth_csv << "id,truth_seconds\n";
    for (std::size_t r = 0; r < res.dataset.size(); ++r)
        truth_csv << res.dataset.id(r) << ","
                  << field_to_string(truth_seconds(spec, res.dataset, r)) << "\n";
    fs::path truth_path = fs::path(a.out).concat(".truth.csv");
    write_text_file(truth_path, truth_csv.str());

    std::ostringstream ids;
    for (const auto& id : res.injected_ids) ids << id << "\n";
    fs::path anomalies_path = fs::path(a.out).concat(".anomalies.txt");
    write_text_file(anomalies_path, ids.str());

    fs::path schema_path = fs::path(a.out).concat(".schema.json");
    write_text_file(schema_path, spec.schema.to_json().dump(2) + "\n");

    std::cout << res.dataset.size() << " records written to " << csv_path.string()
              << " (" << res.injected_ids.size() << " injected anomalies)\n";

    RunManifest manifest;
    manifest.command = "synth";
    manifest.parameters = {{"spec", a.spec}, {"n", std::to_string(a.n)},
                           {"out", a.out}};
    manifest.seed = spec.seed;
    if (!a.spec.empty()) manifest.inputs = {a.spec};
    manifest.outputs = {csv_path, truth_path, anomalies_path, schema_path};
    manifest.write(fs::path(a.out).concat(".manifest.json"));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"benchcast: predictive analytics for benchmark execution data"};
    app.require_subcommand(1);

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand("ingest", "validate a CSV against a schema");
    ingest->add_option("csv", ingest_args.csv, "input CSV")->required();
    ingest->add_option("--schema", ingest_args.schema,
                       "schema JSON (stock layout when omitted)");
    ingest->add_option("--out", ingest_args.out, "output prefix");

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "grid-search and train a model");
    train->add_option("csv", train_args.csv, "training CSV")->required();
    train->add_option("--schema", train_args.schema, "schema JSON");
    train->add_option("--family", train_args.family, "tree|knn|nn|poly");
    train->add_option("--grid", train_args.grid,
                      "candidate grid, e.g. \"min_instances=1,2,4,8\"");
    train->add_option("--split", train_args.split, "train,validation,test fractions");
    train->add_option("--seed", train_args.seed, "random seed");
    train->add_option("--bench", train_args.bench,
                      "train on one benchmark, or 'general'");
    train->add_option("--out", train_args.out, "model file");
    train->add_flag("--include-unvalidated", train_args.include_unvalidated,
                    "keep records with validated=0 in the training set");

    PredictArgs predict_args;
    auto* predict = app.add_subcommand("predict", "append predictions to a CSV");
    predict->add_option("model", predict_args.model, "model JSON")->required();
    predict->add_option("csv", predict_args.csv, "configurations CSV")->required();
    predict->add_option("--out", predict_args.out, "output CSV");

    DetectArgs detect_args;
    auto* detect = app.add_subcommand("detect", "flag anomalous executions");
    detect->set_help_flag("--help", "print help");  // frees --h for the distance flag
    detect->add_option("model", detect_args.model, "model JSON")->required();
    detect->add_option("csv", detect_args.csv, "executions CSV")->required();
    detect->add_option("--n", detect_args.n_sigma, "warning threshold in stdevs");
    detect->add_option("--h", detect_args.hamming, "neighbor Hamming distance");
    detect->add_option("--min-neighbors", detect_args.min_neighbors,
                       "neighbors required for outlier promotion");
    detect->add_option("--min-time", detect_args.min_time,
                       "suspected-failure duration threshold (s)");
    detect->add_option("--out", detect_args.out, "output prefix");
    detect->add_option("--pairs-csv", detect_args.pairs_csv,
                       "also write observed-vs-predicted pairs");

    RecommendArgs rec_args;
    auto* recommend = app.add_subcommand(
        "recommend", "recommend a characterizing set of executions");
    recommend->add_option("csv", rec_args.csv, "executions CSV")->required();
    recommend->add_option("--schema", rec_args.schema, "schema JSON");
    recommend->add_option("--k-range", rec_args.k_range, "from:to:step");
    recommend->add_option("--family", rec_args.family, "model family");
    recommend->add_option("--hp", rec_args.hp, "hyperparameters, e.g. \"k=3\"");
    recommend->add_option("--cost-per-hour", rec_args.cost_per_hour,
                          "cluster cost rate, $/h");
    recommend->add_option("--seed", rec_args.seed, "random seed");
    recommend->add_option("--curve", rec_args.curve_sizes,
                          "also emit a learning curve for these sizes");
    recommend->add_option("--trials", rec_args.trials, "curve trials per size");
    recommend->add_option("--out", rec_args.out, "output prefix");

    RankArgs rank_args;
    auto* rank = app.add_subcommand("rank", "rank configuration variables");
    rank->add_option("model", rank_args.model, "model JSON")->required();
    rank->add_option("--space", rank_args.space, "configuration space JSON")
        ->required();
    rank->add_option("--method", rank_args.method, "least-splits|gini");
    rank->add_option("--cap", rank_args.cap, "maximum unfolded combinations");
    rank->add_option("--classes", rank_args.classes, "gini quantile classes");
    rank->add_option("--out", rank_args.out, "output prefix");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate synthetic benchmark data");
    synth->add_option("--spec", synth_args.spec, "generator spec JSON");
    synth->add_option("--n", synth_args.n, "number of records");
    auto* seed_opt = synth->add_option("--seed", synth_args.seed, "random seed");
    synth->add_option("--out", synth_args.out, "output prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(ingest)) return run_ingest(ingest_args);
        if (app.got_subcommand(train)) return run_train(train_args);
        if (app.got_subcommand(predict)) return run_predict(predict_args);
        if (app.got_subcommand(detect)) return run_detect(detect_args);
        if (app.got_subcommand(recommend)) return run_recommend(rec_args);
        if (app.got_subcommand(rank)) return run_rank(rank_args);
        if (app.got_subcommand(synth)) {
            synth_args.seed_given = seed_opt->count() > 0;
            return run_synth(synth_args);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
