#include <doctest.h>

#include <benchcast/rank.hpp>
#include <benchcast/rng.hpp>
#include <benchcast/synth.hpp>

#include "test_support.hpp"

using namespace benchcast;
namespace ts = test_support;

namespace {

// The 8-configuration example table, rank-ordered fastest first.
RankedTable example_table() {
    RankedTable t;
    t.variables = {"net", "disk", "iofilebuf"};
    t.rows = {
        {"IB", "SSD", "65536"},  {"IB", "SSD", "131072"},
        {"ETH", "SSD", "65536"}, {"ETH", "SSD", "131072"},
        {"IB", "HDD", "65536"},  {"IB", "HDD", "131072"},
        {"ETH", "HDD", "65536"}, {"ETH", "HDD", "131072"},
    };
    t.predictions = {237.817, 237.817, 330.583, 330.583,
                     726.372, 726.372, 963.471, 963.471};
    return t;
}

// Literal transcription of the dichotomous pseudocode, kept deliberately
// naive and independent of the library implementation.
struct OracleTree {
    bool leaf = false;
    double value = 0.0;
    std::string variable;
    std::vector<std::pair<std::string, OracleTree>> branches;
};

OracleTree oracle_least_splits(const RankedTable& e,
                               const std::vector<std::size_t>& row_ids,
                               std::vector<std::size_t> variables) {
    if (row_ids.size() > 1 && !variables.empty()) {
        std::size_t bv = variables[0];
        std::size_t lc = std::numeric_limits<std::size_t>::max();
        for (std::size_t i : variables) {
            std::size_t c = 0;
            for (std::size_t j = 1; j < row_ids.size(); ++j)
                if (e.rows[row_ids[j]][i] != e.rows[row_ids[j - 1]][i]) c = c + 1;
            if (c < lc) {
                bv = i;
                lc = c;
            }
        }
        OracleTree t;
        t.variable = e.variables[bv];
        std::vector<std::size_t> remaining;
        for (std::size_t i : variables)
            if (i != bv) remaining.push_back(i);
        std::vector<std::string> values;
        for (std::size_t r : row_ids)
            if (std::find(values.begin(), values.end(), e.rows[r][bv]) == values.end())
                values.push_back(e.rows[r][bv]);
        for (const auto& v : values) {
            std::vector<std::size_t> sub;
            for (std::size_t r : row_ids)
                if (e.rows[r][bv] == v) sub.push_back(r);
            t.branches.emplace_back(v, oracle_least_splits(e, sub, remaining));
        }
        return t;
    }
    OracleTree t;
    t.leaf = true;
    double sum = 0.0;
    for (std::size_t r : row_ids) sum += e.predictions[r];
    t.value = row_ids.empty() ? 0.0 : sum / static_cast<double>(row_ids.size());
    return t;
}

bool trees_equal(const RankTree& a, const OracleTree& b) {
    if (a.leaf != b.leaf) return false;
    if (a.leaf) return a.value == b.value;
    if (a.variable != b.variable) return false;
    if (a.branches.size() != b.branches.size()) return false;
    for (std::size_t i = 0; i < a.branches.size(); ++i) {
        if (a.branches[i].first != b.branches[i].first) return false;
        if (!trees_equal(a.branches[i].second, b.branches[i].second)) return false;
    }
    return true;
}

bool same_structure(const RankTree& a, const RankTree& b) {
    if (a.leaf != b.leaf) return false;
    if (a.leaf) return true;
    if (a.variable != b.variable || a.branches.size() != b.branches.size())
        return false;
    for (std::size_t i = 0; i < a.branches.size(); ++i) {
        if (a.branches[i].first != b.branches[i].first) return false;
        if (!same_structure(a.branches[i].second, b.branches[i].second)) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("the example table produces the documented tree shape") {
    RankTree tree = least_splits(example_table());
    REQUIRE_FALSE(tree.leaf);
    CHECK(tree.variable == "disk");
    REQUIRE(tree.branches.size() == 2);
    CHECK(tree.branches[0].first == "SSD");  // fastest first in rank order
    CHECK(tree.branches[1].first == "HDD");

    for (const auto& [disk_value, net_node] : tree.branches) {
        REQUIRE_FALSE(net_node.leaf);
        CHECK(net_node.variable == "net");
        REQUIRE(net_node.branches.size() == 2);
        for (const auto& [net_value, buf_node] : net_node.branches) {
            REQUIRE_FALSE(buf_node.leaf);
            CHECK(buf_node.variable == "iofilebuf");
            REQUIRE(buf_node.branches.size() == 2);
            // both buffer settings collapse to the same prediction
            CHECK(buf_node.branches[0].second.value ==
                  buf_node.branches[1].second.value);
        }
    }

    // fastest leaf sits under disk=SSD, net=IB
    CHECK(tree.branches[0].second.branches[0].first == "IB");
    CHECK(tree.branches[0].second.branches[0].second.branches[0].second.value ==
          doctest::Approx(237.817));

    std::string text = render_rank_tree(tree);
    CHECK(text.find("disk=SSD") != std::string::npos);
    CHECK(text.find("iofilebuf=65536|131072 -> 237.817 seconds") !=
          std::string::npos);
    CHECK(leaf_count(tree) == 8);
}

TEST_CASE("random tables match the literal transcription oracle") {
    Rng rng(401);
    for (int trial = 0; trial < 200; ++trial) {
        // 2-3 variables with 2-3 values each
        std::size_t n_vars = 2 + rng.next_index(2);
        RankedTable t;
        std::vector<std::vector<std::string>> value_sets;
        for (std::size_t v = 0; v < n_vars; ++v) {
            t.variables.push_back("v" + std::to_string(v));
            std::vector<std::string> vals;
            std::size_t n_vals = 2 + rng.next_index(2);
            for (std::size_t i = 0; i < n_vals; ++i)
                vals.push_back("x" + std::to_string(i));
            value_sets.push_back(std::move(vals));
        }
        std::size_t product = 1;
        for (const auto& vs : value_sets) product *= vs.size();

        // random subset of the product, keeping distinct configurations
        std::vector<std::size_t> chosen =
            Rng(rng.next_u64()).sample_without_replacement(
                product, 1 + rng.next_index(std::min<std::size_t>(product, 24)));
        for (std::size_t code : chosen) {
            std::vector<std::string> row;
            std::size_t rest = code;
            for (std::size_t v = 0; v < n_vars; ++v) {
                row.push_back(value_sets[v][rest % value_sets[v].size()]);
                rest /= value_sets[v].size();
            }
            t.rows.push_back(std::move(row));
            // small integer predictions so ties happen regularly
            t.predictions.push_back(static_cast<double>(rng.next_index(6)) * 50.0);
        }
        // rank order: ascending by prediction, stable
        std::vector<std::size_t> order(t.rows.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return t.predictions[a] < t.predictions[b];
        });
        RankedTable sorted;
        sorted.variables = t.variables;
        for (std::size_t i : order) {
            sorted.rows.push_back(t.rows[i]);
            sorted.predictions.push_back(t.predictions[i]);
        }

        RankTree got = least_splits(sorted);
        std::vector<std::size_t> row_ids(sorted.rows.size());
        for (std::size_t i = 0; i < row_ids.size(); ++i) row_ids[i] = i;
        std::vector<std::size_t> vars(n_vars);
        for (std::size_t i = 0; i < n_vars; ++i) vars[i] = i;
        OracleTree want = oracle_least_splits(sorted, row_ids, vars);
        CHECK(trees_equal(got, want));
    }
}

TEST_CASE("a constant variable is branched first") {
    RankedTable t;
    t.variables = {"a", "b"};
    t.rows = {{"k", "x"}, {"k", "y"}, {"k", "x"}, {"k", "y"}};
    t.predictions = {1, 2, 3, 4};
    RankTree tree = least_splits(t);
    CHECK(tree.variable == "a");  // zero adjacent changes
    REQUIRE(tree.branches.size() == 1);
    CHECK(tree.branches[0].second.variable == "b");
}

TEST_CASE("root variable minimizes the adjacent-change count") {
    Rng rng(409);
    for (int trial = 0; trial < 30; ++trial) {
        RankedTable t = example_table();
        // shuffle predictions to move rows around, then re-sort
        std::vector<double> preds;
        for (std::size_t i = 0; i < t.rows.size(); ++i)
            preds.push_back(static_cast<double>(rng.next_index(5)) * 10.0);
        std::vector<std::size_t> order(t.rows.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return preds[a] < preds[b]; });
        RankedTable sorted;
        sorted.variables = t.variables;
        for (std::size_t i : order) {
            sorted.rows.push_back(t.rows[i]);
            sorted.predictions.push_back(preds[i]);
        }
        RankTree tree = least_splits(sorted);

        std::size_t root_var = 0;
        for (std::size_t v = 0; v < sorted.variables.size(); ++v)
            if (sorted.variables[v] == tree.variable) root_var = v;
        auto changes = [&](std::size_t v) {
            std::size_t c = 0;
            for (std::size_t i = 1; i < sorted.rows.size(); ++i)
                c += sorted.rows[i][v] != sorted.rows[i - 1][v] ? 1 : 0;
            return c;
        };
        for (std::size_t v = 0; v < sorted.variables.size(); ++v)
            CHECK(changes(root_var) <= changes(v));
    }
}

TEST_CASE("least_splits depends only on rank order, not magnitudes") {
    RankedTable t = example_table();
    RankTree a = least_splits(t);
    RankedTable scaled = t;
    for (auto& p : scaled.predictions) p = std::exp(p / 400.0);  // strictly monotone
    RankTree b = least_splits(scaled);
    CHECK(same_structure(a, b));
}

TEST_CASE("unfold enumerates, predicts and sorts the space") {
    // train a tree whose predictions depend on disk and net only
    std::vector<ExecutionRecord> recs;
    int id = 0;
    for (const char* disk : {"SSD", "HDD"})
        for (const char* net : {"ETH", "IB"})
            for (double maps : {4.0, 8.0}) {
                double time = (std::string(disk) == "HDD" ? 700.0 : 280.0) +
                              (std::string(net) == "ETH" ? 90.0 : 0.0);
                recs.push_back(ts::tiny_record(std::to_string(++id), "b1", time,
                                               disk, net, maps));
            }
    Dataset ds = ts::tiny_dataset(std::move(recs));
    auto rows = ds.all_rows();
    Predictor p = train_tree(ds, rows, 1);

    nlohmann::json jspace{
        {"free",
         {{"disk", {"SSD", "HDD"}}, {"net", {"ETH", "IB"}}, {"maps", {4.0, 8.0}}}},
        {"fixed", {{"bench", "b1"}}}};
    ConfigSpace space = ConfigSpace::from_json(jspace, ds.schema());
    CHECK(space.product_size() == 8);

    RankedTable table = unfold(p, space);
    REQUIRE(table.rows.size() == 8);
    for (std::size_t i = 1; i < table.predictions.size(); ++i)
        CHECK(table.predictions[i] >= table.predictions[i - 1]);  // sortedness
    // free variables come back in schema order: disk, net, maps;
    // the fastest combination is SSD/IB
    CHECK(table.variables == std::vector<std::string>{"disk", "net", "maps"});
    CHECK(table.rows[0][0] == "SSD");
    CHECK(table.rows[0][1] == "IB");

    SUBCASE("single-value space gives one row") {
        nlohmann::json jone{{"free", {{"disk", {"SSD"}}}},
                            {"fixed",
                             {{"net", "ETH"}, {"maps", 4.0}, {"bench", "b1"}}}};
        ConfigSpace one = ConfigSpace::from_json(jone, ds.schema());
        RankedTable small = unfold(p, one);
        CHECK(small.rows.size() == 1);
    }

    SUBCASE("cap violations name the product size") {
        try {
            unfold(p, space, 4);
            FAIL("expected cap error");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("8") != std::string::npos);
        }
    }

    SUBCASE("uncovered input columns are rejected") {
        nlohmann::json bad{{"free", {{"disk", {"SSD"}}}}};
        CHECK_THROWS_AS(ConfigSpace::from_json(bad, ds.schema()),
                        std::invalid_argument);
    }

    SUBCASE("leaf counts add up to the table size") {
        CHECK(leaf_count(least_splits(table)) == table.rows.size());
    }
}

TEST_CASE("gini ranking on the example table puts disk above iofilebuf") {
    auto scores = gini_rank(example_table());
    REQUIRE(scores.size() == 3);
    // disk carries real signal, iofilebuf none; hand computation with
    // quartile classes gives disk 0.5 and iofilebuf 0.75
    double disk_score = 0, buf_score = 0;
    std::size_t disk_pos = 0, buf_pos = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i].first == "disk") {
            disk_score = scores[i].second;
            disk_pos = i;
        }
        if (scores[i].first == "iofilebuf") {
            buf_score = scores[i].second;
            buf_pos = i;
        }
        CHECK(scores[i].second >= 0.0);
        CHECK(scores[i].second <= 1.0 - 1.0 / 4.0);
    }
    CHECK(disk_score == doctest::Approx(0.5));
    CHECK(buf_score == doctest::Approx(0.75));
    CHECK(disk_pos < buf_pos);
}

TEST_CASE("a pure partition scores zero and ranks first") {
    RankedTable t;
    t.variables = {"a", "noise"};
    t.rows = {{"x", "p"}, {"x", "q"}, {"y", "p"}, {"y", "q"}};
    t.predictions = {10, 10, 500, 500};
    auto scores = gini_rank(t, 2);
    CHECK(scores[0].first == "a");
    CHECK(scores[0].second == doctest::Approx(0.0));
}

TEST_CASE("a variable independent of time scores near the unpartitioned impurity") {
    // balanced two-class table; variable b is orthogonal to the time classes
    RankedTable t;
    t.variables = {"a", "b"};
    t.rows.clear();
    for (int i = 0; i < 40; ++i) {
        std::string a = i < 20 ? "fast" : "slow";
        std::string b = i % 2 ? "u" : "v";
        t.rows.push_back({a, b});
        t.predictions.push_back(i < 20 ? 100.0 : 900.0);
    }
    auto scores = gini_rank(t, 2);
    double overall = 0.5;  // two balanced classes -> 1 - 2*(1/2)^2
    bool saw_a = false, saw_b = false;
    for (const auto& [var, score] : scores) {
        if (var == "b") {
            CHECK(std::abs(score - overall) < 0.05);
            saw_b = true;
        }
        if (var == "a") {
            CHECK(score == doctest::Approx(0.0));
            saw_a = true;
        }
    }
    CHECK(saw_a);
    CHECK(saw_b);
}

TEST_CASE("gini error paths") {
    RankedTable t;
    t.variables = {"a"};
    t.rows = {{"x"}};
    t.predictions = {5};
    CHECK_THROWS_AS(gini_rank(t), std::invalid_argument);  // < 2 rows

    t.rows = {{"x"}, {"y"}};
    t.predictions = {5, 5};
    CHECK_THROWS_AS(gini_rank(t), std::invalid_argument);  // all times equal
}

TEST_CASE("gini over dataset rows uses input columns") {
    GeneratorSpec spec = GeneratorSpec::defaults();
    spec.seed = 431;
    Dataset ds = generate(spec, 200).dataset;
    auto rows = ds.all_rows();
    auto scores = gini_rank(ds, rows);
    CHECK(scores.size() == ds.schema().input_indices().size());
    for (std::size_t i = 1; i < scores.size(); ++i)
        CHECK(scores[i - 1].second <= scores[i].second);
}

TEST_CASE("empty table is rejected") {
    RankedTable t;
    CHECK_THROWS_AS(least_splits(t), std::invalid_argument);
}
