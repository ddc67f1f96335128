#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "benchcast/dataset.hpp"
#include "benchcast/predictor.hpp"

namespace benchcast {

// A subspace of configurations to explore: free variables iterate over their
// candidate values, fixed variables hold one value each. Every input column
// of the schema must appear on exactly one side.
struct ConfigSpace {
    std::vector<std::pair<std::string, std::vector<FieldValue>>> free_vars;
    std::vector<std::pair<std::string, FieldValue>> fixed_vars;

    std::size_t product_size() const {
        std::size_t n = 1;
        for (const auto& [name, values] : free_vars) n *= values.size();
        return n;
    }

    static ConfigSpace from_json(const nlohmann::json& j, const DatasetSchema& schema) {
        auto to_field = [&](std::size_t col, const nlohmann::json& v) -> FieldValue {
            if (schema.is_numeric(col)) return v.get<double>();
            std::string s = v.get<std::string>();
            if (!schema.allows_category(col, s))
                throw std::invalid_argument("config space: value '" + s +
                                            "' not allowed for column '" +
                                            schema.column(col).name + "'");
            return s;
        };
        ConfigSpace space;
        std::map<std::string, bool> seen;
        if (j.contains("free")) {
            for (const auto& [name, values] : j["free"].items()) {
                std::size_t col = schema.require(name);
                std::vector<FieldValue> fv;
                for (const auto& v : values) fv.push_back(to_field(col, v));
                if (fv.empty())
                    throw std::invalid_argument("config space: free variable '" + name +
                                                "' has no candidate values");
                space.free_vars.emplace_back(name, std::move(fv));
                seen[name] = true;
            }
        }
        if (j.contains("fixed")) {
            for (const auto& [name, v] : j["fixed"].items()) {
                std::size_t col = schema.require(name);
                space.fixed_vars.emplace_back(name, to_field(col, v));
                seen[name] = true;
            }
        }
        for (std::size_t c : schema.input_indices()) {
            if (!seen.count(schema.column(c).name))
                throw std::invalid_argument("config space: input column '" +
                                            schema.column(c).name +
                                            "' is neither free nor fixed");
        }
        // keep free variables in schema order for deterministic output
        std::sort(space.free_vars.begin(), space.free_vars.end(),
                  [&](const auto& a, const auto& b) {
                      return schema.require(a.first) < schema.require(b.first);
                  });
        return space;
    }
};

// Cartesian product of the free variables with one prediction per row,
// sorted fastest-first. Cell values are kept in canonical text form; the
// ranking algorithms only ever compare them for equality.
struct RankedTable {
    std::vector<std::string> variables;
    std::vector<std::vector<std::string>> rows;
    std::vector<double> predictions;

    std::string to_csv() const {
        std::string out;
        for (std::size_t i = 0; i < variables.size(); ++i)
            out += (i ? "," : "") + variables[i];
        out += ",predicted_seconds\n";
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t i = 0; i < rows[r].size(); ++i)
                out += (i ? "," : "") + rows[r][i];
            out += "," + field_to_string(predictions[r]) + "\n";
        }
        return out;
    }
};

// Enumerates the whole space (first free variable slowest), predicts every
// combination, and sorts ascending by predicted time. The stable sort over a
// lexicographic enumeration makes tie order lexicographic as well.
inline RankedTable unfold(const Predictor& p, const ConfigSpace& space,
                          std::size_t cap = 1000000) {
    std::size_t total = space.product_size();
    if (total > cap)
        throw std::invalid_argument("unfold: configuration space has " +
                                    std::to_string(total) +
                                    " combinations, above the cap of " +
                                    std::to_string(cap));
    const DatasetSchema& schema = p.schema();

    ExecutionRecord base;
    base.fields.resize(schema.size(), std::string{});
    for (std::size_t c = 0; c < schema.size(); ++c)
        if (schema.is_numeric(c)) base.fields[c] = 0.0;
    for (const auto& [name, value] : space.fixed_vars)
        base.fields[schema.require(name)] = value;

    std::vector<std::size_t> free_cols;
    for (const auto& [name, values] : space.free_vars)
        free_cols.push_back(schema.require(name));

    std::vector<ExecutionRecord> recs;
    recs.reserve(total);
    std::vector<std::size_t> odo(space.free_vars.size(), 0);
    for (std::size_t i = 0; i < total; ++i) {
        ExecutionRecord rec = base;
        for (std::size_t v = 0; v < odo.size(); ++v)
            rec.fields[free_cols[v]] = space.free_vars[v].second[odo[v]];
        recs.push_back(std::move(rec));
        for (std::size_t v = odo.size(); v-- > 0;) {
            if (++odo[v] < space.free_vars[v].second.size()) break;
            odo[v] = 0;
        }
    }

    // identity columns must stay unique even for synthetic rows
    if (auto idc = schema.identity_index())
        for (std::size_t i = 0; i < recs.size(); ++i)
            recs[i].fields[*idc] = std::to_string(i + 1);

    Dataset grid(schema, std::move(recs), "unfold");
    auto rows = grid.all_rows();
    std::vector<double> pred = p.predict_rows(grid, rows);

    std::vector<std::size_t> order(total);
    for (std::size_t i = 0; i < total; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pred[a] < pred[b]; });

    RankedTable table;
    for (const auto& [name, values] : space.free_vars) table.variables.push_back(name);
    for (std::size_t i : order) {
        std::vector<std::string> cells;
        for (std::size_t v = 0; v < free_cols.size(); ++v)
            cells.push_back(field_to_string(grid.record(i).fields[free_cols[v]]));
        table.rows.push_back(std::move(cells));
        table.predictions.push_back(pred[i]);
    }
    return table;
}

// Dichotomous descriptive tree: at each level, branch on the variable whose
// values change the fewest times down the rank-ordered table, then recurse
// per value with that variable fixed. Leaves carry the prediction of their
// (usually single-row) sub-table.
struct RankTree {
    bool leaf = false;
    double value = 0.0;
    std::size_t count = 0;
    std::string variable;
    std::vector<std::pair<std::string, RankTree>> branches;
};

namespace rank_detail {

inline RankTree least_splits_impl(const RankedTable& table,
                                  const std::vector<std::size_t>& rows,
                                  std::vector<bool> available) {
    RankTree node;
    bool any_var = std::find(available.begin(), available.end(), true) !=
                   available.end();
    if (rows.size() <= 1 || !any_var) {
        node.leaf = true;
        node.count = rows.size();
        double sum = 0.0;
        for (std::size_t r : rows) sum += table.predictions[r];
        node.value = rows.empty() ? 0.0 : sum / static_cast<double>(rows.size());
        return node;
    }

    // count adjacent value changes per remaining variable; strict less keeps
    // the earliest variable on ties
    std::size_t best_var = 0;
    std::size_t least = std::numeric_limits<std::size_t>::max();
    for (std::size_t v = 0; v < table.variables.size(); ++v) {
        if (!available[v]) continue;
        std::size_t changes = 0;
        for (std::size_t i = 1; i < rows.size(); ++i)
            changes += table.rows[rows[i]][v] != table.rows[rows[i - 1]][v] ? 1 : 0;
        if (changes < least) {
            least = changes;
            best_var = v;
        }
    }

    node.variable = table.variables[best_var];
    available[best_var] = false;

    // branch per distinct value, in order of first appearance; each
    // sub-table keeps the parent's rank order
    std::vector<std::string> values;
    for (std::size_t r : rows) {
        const std::string& v = table.rows[r][best_var];
        if (std::find(values.begin(), values.end(), v) == values.end())
            values.push_back(v);
    }
    for (const auto& value : values) {
        std::vector<std::size_t> sub;
        for (std::size_t r : rows)
            if (table.rows[r][best_var] == value) sub.push_back(r);
        node.branches.emplace_back(value,
                                   least_splits_impl(table, sub, available));
    }
    return node;
}

}  // namespace rank_detail

inline RankTree least_splits(const RankedTable& table) {
    if (table.rows.empty())
        throw std::invalid_argument("least_splits: table is empty");
    std::vector<std::size_t> rows(table.rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return rank_detail::least_splits_impl(table, rows,
                                          std::vector<bool>(table.variables.size(), true));
}

inline std::size_t leaf_count(const RankTree& t) {
    if (t.leaf) return t.count;
    std::size_t n = 0;
    for (const auto& [value, child] : t.branches) n += leaf_count(child);
    return n;
}

namespace rank_detail {

inline void render(const RankTree& t, const std::string& indent, std::string& out) {
    if (t.leaf) return;  // leaves print on their parent's branch line
    // sibling leaves with equal predictions merge into one "v1|v2" line
    std::vector<bool> used(t.branches.size(), false);
    for (std::size_t i = 0; i < t.branches.size(); ++i) {
        if (used[i]) continue;
        const auto& [value, child] = t.branches[i];
        if (child.leaf) {
            std::string label = value;
            for (std::size_t j = i + 1; j < t.branches.size(); ++j) {
                if (used[j] || !t.branches[j].second.leaf) continue;
                if (t.branches[j].second.value == child.value) {
                    label += "|" + t.branches[j].first;
                    used[j] = true;
                }
            }
            out += indent + t.variable + "=" + label + " -> " +
                   field_to_string(child.value) + " seconds\n";
        } else {
            out += indent + t.variable + "=" + value + "\n";
            render(child, indent + "    ", out);
        }
        used[i] = true;
    }
}

inline nlohmann::json tree_json(const RankTree& t) {
    if (t.leaf)
        return nlohmann::json{{"prediction", t.value}, {"rows", t.count}};
    nlohmann::json branches = nlohmann::json::object();
    for (const auto& [value, child] : t.branches) branches[value] = tree_json(child);
    return nlohmann::json{{"variable", t.variable}, {"branches", branches}};
}

}  // namespace rank_detail

inline std::string render_rank_tree(const RankTree& t) {
    std::string out;
    rank_detail::render(t, "", out);
    if (t.leaf)
        out = "-> " + field_to_string(t.value) + " seconds\n";
    return out;
}

inline nlohmann::json rank_tree_json(const RankTree& t) {
    return rank_detail::tree_json(t);
}

// Gini-style variable ranking: discretize the times into quantile classes
// (quartiles unless asked otherwise) and score each variable by the weighted
// Gini impurity of the class distribution after partitioning on its values.
// Lower scores separate fast from slow configurations more sharply.
inline std::vector<std::pair<std::string, double>> gini_rank_values(
    const std::vector<std::string>& variables,
    const std::vector<std::vector<std::string>>& rows,
    const std::vector<double>& times, int classes = 4) {
    if (rows.size() < 2)
        throw std::invalid_argument("gini_rank: need at least 2 rows");
    if (classes < 2) throw std::invalid_argument("gini_rank: need >= 2 classes");

    std::vector<double> sorted(times);
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back())
        throw std::invalid_argument("gini_rank: all execution times are equal");

    // quantile boundaries at midpoints between adjacent order statistics;
    // values sitting exactly on a boundary fall into the lower class
    const std::size_t n = times.size();
    std::vector<double> boundaries;
    for (int c = 1; c < classes; ++c) {
        std::size_t idx = n * static_cast<std::size_t>(c) / classes;
        if (idx == 0 || idx >= n) continue;
        boundaries.push_back((sorted[idx - 1] + sorted[idx]) / 2.0);
    }

    std::vector<int> cls(n);
    for (std::size_t r = 0; r < n; ++r) {
        int c = 0;
        for (double b : boundaries) c += times[r] > b ? 1 : 0;
        cls[r] = c;
    }

    std::vector<std::pair<std::string, double>> scores;
    for (std::size_t v = 0; v < variables.size(); ++v) {
        std::map<std::string, std::map<int, std::size_t>> partition;
        for (std::size_t r = 0; r < n; ++r) ++partition[rows[r][v]][cls[r]];
        double weighted = 0.0;
        for (const auto& [value, counts] : partition) {
            std::size_t group = 0;
            for (const auto& [c, cnt] : counts) group += cnt;
            double impurity = 1.0;
            for (const auto& [c, cnt] : counts) {
                double p = static_cast<double>(cnt) / static_cast<double>(group);
                impurity -= p * p;
            }
            weighted += impurity * static_cast<double>(group) / static_cast<double>(n);
        }
        scores.emplace_back(variables[v], weighted);
    }
    std::stable_sort(scores.begin(), scores.end(),
                     [](const auto& a, const auto& b) { return a.second < b.second; });
    return scores;
}

inline std::vector<std::pair<std::string, double>> gini_rank(
    const RankedTable& table, int classes = 4) {
    return gini_rank_values(table.variables, table.rows, table.predictions, classes);
}

inline std::vector<std::pair<std::string, double>> gini_rank(
    const Dataset& ds, std::span<const std::size_t> rows, int classes = 4) {
    std::vector<std::string> variables;
    std::vector<std::size_t> cols = ds.schema().input_indices();
    for (std::size_t c : cols) variables.push_back(ds.schema().column(c).name);
    std::vector<std::vector<std::string>> cells;
    std::vector<double> times;
    for (std::size_t r : rows) {
        std::vector<std::string> row;
        for (std::size_t c : cols)
            row.push_back(field_to_string(ds.record(r).fields[c]));
        cells.push_back(std::move(row));
        times.push_back(ds.exe_time(r));
    }
    return gini_rank_values(variables, cells, times, classes);
}

}  // namespace benchcast
