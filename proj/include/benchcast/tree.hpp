#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "benchcast/dataset.hpp"
#include "benchcast/encoding.hpp"

namespace benchcast {

// Binary regression tree over raw dataset columns. Numeric splits compare
// against a threshold (<= goes left); categorical splits are one value
// versus the rest (match goes left).
struct TreeNode {
    int column = -1;  // fitted-schema column index; -1 marks a leaf
    bool categorical = false;
    std::string category;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;     // leaf: mean execution time of its rows
    std::size_t count = 0;  // leaf: training rows that landed here
};

struct TreeModel {
    int min_instances = 1;
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict_bound(const Dataset& ds, std::size_t row,
                         const SchemaBinding& b) const {
        const TreeNode* node = &nodes.at(0);
        while (node->column >= 0) {
            std::size_t col = b.map[static_cast<std::size_t>(node->column)];
            bool go_left;
            if (node->categorical)
                go_left = ds.record(row).text(col) == node->category;
            else
                go_left = ds.record(row).numeric(col) <= node->threshold;
            node = &nodes[static_cast<std::size_t>(go_left ? node->left : node->right)];
        }
        return node->value;
    }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& n : nodes) {
            nlohmann::json jn;
            jn["column"] = n.column;
            if (n.column >= 0) {
                jn["categorical"] = n.categorical;
                if (n.categorical)
                    jn["category"] = n.category;
                else
                    jn["threshold"] = n.threshold;
                jn["left"] = n.left;
                jn["right"] = n.right;
            } else {
                jn["value"] = n.value;
                jn["count"] = n.count;
            }
            arr.push_back(jn);
        }
        return nlohmann::json{{"min_instances", min_instances}, {"nodes", arr}};
    }

    static TreeModel from_json(const nlohmann::json& j) {
        TreeModel m;
        m.min_instances = j.at("min_instances").get<int>();
        for (const auto& jn : j.at("nodes")) {
            TreeNode n;
            n.column = jn.at("column").get<int>();
            if (n.column >= 0) {
                n.categorical = jn.at("categorical").get<bool>();
                if (n.categorical)
                    n.category = jn.at("category").get<std::string>();
                else
                    n.threshold = jn.at("threshold").get<double>();
                n.left = jn.at("left").get<int>();
                n.right = jn.at("right").get<int>();
            } else {
                n.value = jn.at("value").get<double>();
                n.count = jn.at("count").get<std::size_t>();
            }
            m.nodes.push_back(std::move(n));
        }
        return m;
    }
};

namespace tree_detail {

struct SplitChoice {
    bool found = false;
    std::size_t column = 0;
    bool categorical = false;
    std::string category;
    double threshold = 0.0;
    double reduction = 0.0;
};

struct NodeStats {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;
    double sse() const { return n == 0 ? 0.0 : sum_sq - sum * sum / static_cast<double>(n); }
    double mean() const { return sum / static_cast<double>(n); }
};

// Best variance-reduction split for the node's rows. Columns are scanned in
// schema order, numeric thresholds ascending, categorical values in schema
// value order; a strictly better reduction is required to displace the
// incumbent, so ties resolve to the first candidate. Both children must keep
// at least min_instances rows.
inline SplitChoice best_split(const Dataset& ds, const std::vector<std::size_t>& rows,
                              int min_instances) {
    const DatasetSchema& s = ds.schema();
    const auto min_n = static_cast<std::size_t>(min_instances);

    NodeStats total;
    for (std::size_t r : rows) {
        double y = ds.exe_time(r);
        total.sum += y;
        total.sum_sq += y * y;
        ++total.n;
    }
    double parent_sse = total.sse();

    SplitChoice best;
    for (std::size_t ci : s.input_indices()) {
        const ColumnSpec& col = s.column(ci);
        if (col.kind == FieldKind::NumericInput) {
            std::vector<std::pair<double, double>> xy;  // (x, time)
            xy.reserve(rows.size());
            for (std::size_t r : rows)
                xy.emplace_back(ds.record(r).numeric(ci), ds.exe_time(r));
            // full (x, time) key: equal-x runs sum in a fixed order on every
            // platform, keeping split scores bit-reproducible
            std::sort(xy.begin(), xy.end());
            NodeStats left;
            for (std::size_t i = 0; i + 1 < xy.size(); ++i) {
                left.sum += xy[i].second;
                left.sum_sq += xy[i].second * xy[i].second;
                ++left.n;
                if (xy[i].first == xy[i + 1].first) continue;
                std::size_t right_n = xy.size() - left.n;
                if (left.n < min_n || right_n < min_n) continue;
                NodeStats right{total.sum - left.sum, total.sum_sq - left.sum_sq,
                                right_n};
                double reduction = parent_sse - left.sse() - right.sse();
                if (!best.found || reduction > best.reduction) {
                    best.found = true;
                    best.column = ci;
                    best.categorical = false;
                    best.threshold = (xy[i].first + xy[i + 1].first) / 2.0;
                    best.reduction = reduction;
                }
            }
        } else {
            for (const std::string& value : col.values) {
                NodeStats match;
                for (std::size_t r : rows) {
                    if (ds.record(r).text(ci) == value) {
                        double y = ds.exe_time(r);
                        match.sum += y;
                        match.sum_sq += y * y;
                        ++match.n;
                    }
                }
                std::size_t rest_n = rows.size() - match.n;
                if (match.n < min_n || rest_n < min_n) continue;
                NodeStats rest{total.sum - match.sum, total.sum_sq - match.sum_sq,
                               rest_n};
                double reduction = parent_sse - match.sse() - rest.sse();
                if (!best.found || reduction > best.reduction) {
                    best.found = true;
                    best.column = ci;
                    best.categorical = true;
                    best.category = value;
                    best.reduction = reduction;
                }
            }
        }
    }
    return best;
}

inline int build(TreeModel& model, const Dataset& ds, std::vector<std::size_t> rows,
                 int min_instances) {
    double min_t = std::numeric_limits<double>::infinity();
    double max_t = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t r : rows) {
        double y = ds.exe_time(r);
        min_t = std::min(min_t, y);
        max_t = std::max(max_t, y);
        sum += y;
    }

    auto make_leaf = [&]() {
        TreeNode leaf;
        // a pure leaf predicts its unanimous value exactly, no rounding
        leaf.value = min_t == max_t ? min_t : sum / static_cast<double>(rows.size());
        leaf.count = rows.size();
        model.nodes.push_back(leaf);
        return static_cast<int>(model.nodes.size() - 1);
    };

    // Stop on too few rows for two branches or on a pure node.
    if (rows.size() < 2 * static_cast<std::size_t>(min_instances) || min_t == max_t)
        return make_leaf();

    SplitChoice split = best_split(ds, rows, min_instances);
    if (!split.found) return make_leaf();

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
        bool go_left;
        if (split.categorical)
            go_left = ds.record(r).text(split.column) == split.category;
        else
            go_left = ds.record(r).numeric(split.column) <= split.threshold;
        (go_left ? left_rows : right_rows).push_back(r);
    }

    TreeNode node;
    node.column = static_cast<int>(split.column);
    node.categorical = split.categorical;
    node.category = split.category;
    node.threshold = split.threshold;
    model.nodes.push_back(node);
    auto self = static_cast<int>(model.nodes.size() - 1);
    rows.clear();
    rows.shrink_to_fit();
    int left = build(model, ds, std::move(left_rows), min_instances);
    int right = build(model, ds, std::move(right_rows), min_instances);
    model.nodes[static_cast<std::size_t>(self)].left = left;
    model.nodes[static_cast<std::size_t>(self)].right = right;
    return self;
}

}  // namespace tree_detail

inline TreeModel fit_tree(const Dataset& ds, std::span<const std::size_t> rows,
                          int min_instances_per_branch) {
    if (rows.empty())
        throw std::invalid_argument("train_tree: empty training set");
    if (min_instances_per_branch < 1)
        throw std::invalid_argument("train_tree: min_instances_per_branch must be >= 1");
    TreeModel model;
    model.min_instances = min_instances_per_branch;
    std::vector<std::size_t> all(rows.begin(), rows.end());
    tree_detail::build(model, ds, std::move(all), min_instances_per_branch);
    return model;
}

}  // namespace benchcast
