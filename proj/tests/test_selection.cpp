#include <doctest.h>

#include <benchcast/selection.hpp>
#include <benchcast/synth.hpp>

#include "test_support.hpp"

using namespace benchcast;
namespace ts = test_support;

namespace {

Dataset synth_ds(std::uint64_t seed, std::size_t n) {
    GeneratorSpec spec = GeneratorSpec::defaults();
    spec.seed = seed;
    return generate(spec, n).dataset;
}

}  // namespace

TEST_CASE("singleton grid reports its only candidate") {
    Dataset ds = synth_ds(101, 200);
    SearchSpec spec;
    spec.family = Family::Knn;
    spec.grid = {{{"k", 1}}};
    spec.split = split(ds, {0.5, 0.25, 0.25}, 7);
    SelectionReport rep = grid_search(ds, spec);
    REQUIRE(rep.candidates.size() == 1);
    CHECK(rep.best_index == 0);
    CHECK(rep.best.at("k") == 1);
    CHECK(rep.test.n == spec.split.test.size());
}

TEST_CASE("selected candidate matches an independent re-evaluation") {
    Dataset ds = synth_ds(103, 300);
    SearchSpec spec;
    spec.family = Family::Tree;
    spec.grid = default_grid(Family::Tree);
    spec.split = split(ds, {0.5, 0.25, 0.25}, 11);
    SelectionReport rep = grid_search(ds, spec);

    // recompute each candidate outside the search path
    std::size_t best = 0;
    double best_rae = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
        Predictor p = train_family(ds, spec.split.train, Family::Tree, spec.grid[i]);
        double v = evaluate_on(p, ds, spec.split.validation).rae;
        if (v < best_rae) {
            best_rae = v;
            best = i;
        }
    }
    CHECK(rep.best_index == best);
    CHECK(rep.validation.rae == doctest::Approx(best_rae).epsilon(1e-12));
    CHECK(rep.validation.rae ==
          doctest::Approx(rep.candidates[rep.best_index].validation.rae));

    // reported best equals the min over the candidate list
    for (const auto& c : rep.candidates)
        CHECK(rep.candidates[rep.best_index].objective_value <= c.objective_value);
}

TEST_CASE("test rows never influence candidate choice") {
    Dataset ds = synth_ds(107, 240);
    SearchSpec spec;
    spec.family = Family::Knn;
    spec.grid = default_grid(Family::Knn);
    spec.split = split(ds, {0.5, 0.25, 0.25}, 13);
    SelectionReport before = grid_search(ds, spec);

    // poison the observed time of every test row; selection must not move
    std::vector<ExecutionRecord> recs = ds.records();
    for (std::size_t r : spec.split.test)
        recs[r].fields[ds.schema().output_index()] = 1e6 + static_cast<double>(r);
    Dataset poisoned(ds.schema(), std::move(recs));
    SelectionReport after = grid_search(poisoned, spec);

    CHECK(after.best_index == before.best_index);
    REQUIRE(after.candidates.size() == before.candidates.size());
    for (std::size_t i = 0; i < after.candidates.size(); ++i) {
        CHECK(after.candidates[i].validation.mae ==
              before.candidates[i].validation.mae);
        CHECK(after.candidates[i].validation.rae ==
              before.candidates[i].validation.rae);
    }
    CHECK(after.test.mae != before.test.mae);  // test stats do see the change
}

TEST_CASE("fixed seed gives an identical report") {
    Dataset ds = synth_ds(109, 200);
    SearchSpec spec;
    spec.family = Family::NeuralNet;
    spec.grid = {{{"hidden", 6}, {"lr", 0.05}, {"max_iter", 40}}};
    spec.split = split(ds, {0.5, 0.25, 0.25}, 17);
    spec.train_seed = 23;
    SelectionReport a = grid_search(ds, spec);
    SelectionReport b = grid_search(ds, spec);
    CHECK(a.validation.rae == b.validation.rae);
    CHECK(a.test.rae == b.test.rae);
    CHECK(a.to_json() == b.to_json());
}

TEST_CASE("ties go to the first candidate in grid order") {
    Dataset ds = synth_ds(113, 150);
    SearchSpec spec;
    spec.family = Family::Knn;
    spec.grid = {{{"k", 3}}, {{"k", 3}}};  // identical candidates
    spec.split = split(ds, {0.5, 0.25, 0.25}, 19);
    SelectionReport rep = grid_search(ds, spec);
    CHECK(rep.best_index == 0);
}

TEST_CASE("grid_search error paths") {
    Dataset ds = synth_ds(127, 60);
    SearchSpec spec;
    spec.family = Family::Tree;
    spec.split = split(ds, {0.5, 0.25, 0.25}, 3);
    CHECK_THROWS_AS(grid_search(ds, spec), std::invalid_argument);  // empty grid

    spec.grid = default_grid(Family::Tree);
    spec.split.validation.clear();
    CHECK_THROWS_AS(grid_search(ds, spec), std::invalid_argument);
}

TEST_CASE("unvalidated rows are excluded from training by default") {
    Dataset base = synth_ds(131, 120);
    std::vector<ExecutionRecord> recs = base.records();
    auto vcol = base.schema().require("validated");
    for (std::size_t r = 0; r < recs.size(); r += 2)
        recs[r].fields[vcol] = std::string("0");
    Dataset ds(base.schema(), std::move(recs));

    SearchSpec spec;
    spec.family = Family::Tree;
    spec.grid = {{{"min_instances", 1}}};
    spec.split = split(ds, {0.5, 0.25, 0.25}, 5);

    SelectionReport excl = grid_search(ds, spec);
    spec.include_unvalidated = true;
    SelectionReport incl = grid_search(ds, spec);
    // training sets differ, so at least one summary differs
    CHECK((excl.validation.mae != incl.validation.mae ||
           excl.test.mae != incl.test.mae));
}

TEST_CASE("single benchmark: general and specific coincide") {
    GeneratorSpec spec = GeneratorSpec::defaults();
    spec.seed = 137;
    spec.benchmarks.erase("cpulike");
    Dataset ds = generate(spec, 150).dataset;
    auto cmp = compare_general_specific(ds, Family::Tree, {{"min_instances", 2}},
                                        {0.5, 0.25, 0.25}, 7);
    REQUIRE(cmp.size() == 1);
    CHECK_FALSE(cmp[0].skipped);
    CHECK(std::abs(cmp[0].general_rae - cmp[0].specific_rae) < 1e-12);
}

TEST_CASE("comparison output has one row per benchmark") {
    Dataset ds = synth_ds(139, 300);
    auto cmp = compare_general_specific(ds, Family::Tree, {{"min_instances", 2}},
                                        {0.5, 0.25, 0.25}, 7);
    REQUIRE(cmp.size() == 2);
    CHECK(cmp[0].benchmark != cmp[1].benchmark);
    for (const auto& c : cmp) {
        CHECK_FALSE(c.skipped);
        CHECK(c.n_test > 0);
        CHECK(std::isfinite(c.general_rae));
        CHECK(std::isfinite(c.specific_rae));
    }
}

TEST_CASE("specific fits similarly or better (median over seeds)") {
    std::map<std::string, std::vector<double>> general, specific;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        GeneratorSpec g = ts::conflicting_benchmarks_spec();
        g.seed = 5000 + seed;
        Dataset ds = generate(g, 400).dataset;
        auto cmp = compare_general_specific(ds, Family::Tree, {{"min_instances", 2}},
                                            {0.5, 0.25, 0.25}, seed);
        for (const auto& c : cmp) {
            general[c.benchmark].push_back(c.general_rae);
            specific[c.benchmark].push_back(c.specific_rae);
        }
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        std::size_t n = v.size();
        return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
    };
    for (const auto& [bench, g] : general) {
        double mg = median(g);
        double ms = median(specific[bench]);
        CHECK(ms <= mg + 1e-12);
    }
}

TEST_CASE("benchmarks with too few rows are skipped with a notice") {
    GeneratorSpec g = GeneratorSpec::defaults();
    g.seed = 149;
    Dataset base = generate(g, 100).dataset;
    // keep only 3 rows of cpulike
    auto bcol = base.schema().require("bench");
    std::vector<ExecutionRecord> recs;
    int cpu_kept = 0;
    for (const auto& r : base.records()) {
        if (r.text(bcol) == "cpulike" && cpu_kept >= 3) continue;
        if (r.text(bcol) == "cpulike") ++cpu_kept;
        recs.push_back(r);
    }
    Dataset ds(base.schema(), std::move(recs));
    auto cmp = compare_general_specific(ds, Family::Tree, {{"min_instances", 1}},
                                        {0.5, 0.25, 0.25}, 3);
    bool found_skip = false;
    for (const auto& c : cmp)
        if (c.benchmark == "cpulike") {
            CHECK(c.skipped);
            CHECK_FALSE(c.note.empty());
            found_skip = true;
        }
    CHECK(found_skip);
}

TEST_CASE("stock grids carry the published sweeps") {
    auto tree = default_grid(Family::Tree);
    REQUIRE(tree.size() == 4);
    CHECK(tree[0].at("min_instances") == 1);
    CHECK(tree[3].at("min_instances") == 8);

    auto knn = default_grid(Family::Knn);
    bool has_k3 = false;
    for (const auto& hp : knn) has_k3 |= hp.at("k") == 3;
    CHECK(has_k3);

    auto nn = default_grid(Family::NeuralNet);
    REQUIRE(nn.size() == 1);
    CHECK(nn[0].at("hidden") == 300);
    CHECK(nn[0].at("lr") == 0.2);
    CHECK(nn[0].at("max_iter") == 1000);

    auto poly = default_grid(Family::Polynomial);
    REQUIRE(poly.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(poly[i].at("degree") == static_cast<double>(i + 1));
}
