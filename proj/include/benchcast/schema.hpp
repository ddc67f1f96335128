#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace benchcast {

enum class FieldKind {
    CategoricalInput,
    NumericInput,
    OutputTime,
    Identity,
    Metadata,
};

inline std::string to_string(FieldKind k) {
    switch (k) {
        case FieldKind::CategoricalInput: return "categorical_input";
        case FieldKind::NumericInput: return "numeric_input";
        case FieldKind::OutputTime: return "output_time";
        case FieldKind::Identity: return "identity";
        case FieldKind::Metadata: return "metadata";
    }
    return "unknown";
}

inline FieldKind field_kind_from_string(const std::string& s) {
    if (s == "categorical_input") return FieldKind::CategoricalInput;
    if (s == "numeric_input") return FieldKind::NumericInput;
    if (s == "output_time") return FieldKind::OutputTime;
    if (s == "identity") return FieldKind::Identity;
    if (s == "metadata") return FieldKind::Metadata;
    throw std::invalid_argument("schema: unknown field kind '" + s + "'");
}

struct ColumnSpec {
    std::string name;
    FieldKind kind = FieldKind::Metadata;
    std::vector<std::string> values;                    // categorical only
    std::optional<std::pair<double, double>> bounds;    // numeric only
};

// Ordered, typed column definitions for one dataset layout. Exactly one
// column carries the observed execution time; every other column is an
// input, an identity field, or free-form metadata.
class DatasetSchema {
  public:
    DatasetSchema() = default;

    explicit DatasetSchema(std::vector<ColumnSpec> columns)
        : columns_(std::move(columns)) {
        validate();
    }

    const std::vector<ColumnSpec>& columns() const { return columns_; }
    std::size_t size() const { return columns_.size(); }
    const ColumnSpec& column(std::size_t i) const { return columns_.at(i); }

    std::optional<std::size_t> find(const std::string& name) const {
        for (std::size_t i = 0; i < columns_.size(); ++i)
            if (columns_[i].name == name) return i;
        return std::nullopt;
    }

    std::size_t require(const std::string& name) const {
        auto idx = find(name);
        if (!idx)
            throw std::invalid_argument("schema: no column named '" + name + "'");
        return *idx;
    }

    std::size_t output_index() const { return output_index_; }

    // First identity column, used as the record id. Absent in reduced
    // configuration-only schemas.
    std::optional<std::size_t> identity_index() const { return identity_index_; }

    // Indices of CategoricalInput and NumericInput columns, in schema order.
    const std::vector<std::size_t>& input_indices() const { return input_indices_; }

    bool is_input(std::size_t i) const {
        FieldKind k = columns_.at(i).kind;
        return k == FieldKind::CategoricalInput || k == FieldKind::NumericInput;
    }

    bool is_numeric(std::size_t i) const {
        FieldKind k = columns_.at(i).kind;
        return k == FieldKind::NumericInput || k == FieldKind::OutputTime;
    }

    // The benchmark-type column, by the conventional name "bench".
    std::optional<std::size_t> benchmark_index() const {
        auto idx = find("bench");
        if (idx && columns_[*idx].kind == FieldKind::CategoricalInput) return idx;
        return std::nullopt;
    }

    bool allows_category(std::size_t col, const std::string& value) const {
        const auto& vs = columns_.at(col).values;
        return std::find(vs.begin(), vs.end(), value) != vs.end();
    }

    // Schema with a subset of columns, preserving order. Used for reduced
    // configuration files (no ids, no observed time).
    DatasetSchema project(const std::vector<std::size_t>& keep) const {
        std::vector<ColumnSpec> cols;
        cols.reserve(keep.size());
        for (std::size_t i : keep) cols.push_back(columns_.at(i));
        DatasetSchema s;
        s.columns_ = std::move(cols);
        s.index(/*require_output=*/false);
        return s;
    }

    bool has_output() const { return has_output_; }

    nlohmann::json to_json() const {
        nlohmann::json cols = nlohmann::json::array();
        for (const auto& c : columns_) {
            nlohmann::json jc;
            jc["name"] = c.name;
            jc["kind"] = to_string(c.kind);
            if (c.kind == FieldKind::CategoricalInput) jc["values"] = c.values;
            if (c.bounds) jc["bounds"] = {c.bounds->first, c.bounds->second};
            cols.push_back(jc);
        }
        return nlohmann::json{{"columns", cols}};
    }

    // Accepts either a bare list of column objects or {"columns": [...]}.
    static DatasetSchema from_json(const nlohmann::json& j) {
        const nlohmann::json* list = &j;
        if (j.is_object() && j.contains("columns")) list = &j["columns"];
        if (!list->is_array())
            throw std::invalid_argument("schema: JSON must be a column list");
        std::vector<ColumnSpec> cols;
        for (const auto& jc : *list) {
            ColumnSpec c;
            c.name = jc.at("name").get<std::string>();
            c.kind = field_kind_from_string(jc.at("kind").get<std::string>());
            if (jc.contains("values"))
                c.values = jc["values"].get<std::vector<std::string>>();
            if (jc.contains("bounds")) {
                auto b = jc["bounds"].get<std::vector<double>>();
                if (b.size() != 2)
                    throw std::invalid_argument("schema: bounds must be [min, max]");
                c.bounds = {b[0], b[1]};
            }
            cols.push_back(std::move(c));
        }
        return DatasetSchema(std::move(cols));
    }

    // The stock benchmark-repository layout this toolkit ships with:
    // 17 columns, ids first, observed time in seconds, mixed categorical
    // and numeric configuration attributes, review metadata at the end.
    static DatasetSchema stock() {
        std::vector<ColumnSpec> cols;
        auto cat = [&](std::string name, std::vector<std::string> values) {
            cols.push_back({std::move(name), FieldKind::CategoricalInput,
                            std::move(values), std::nullopt});
        };
        auto num = [&](std::string name, double lo, double hi) {
            cols.push_back({std::move(name), FieldKind::NumericInput, {},
                            std::make_pair(lo, hi)});
        };
        cols.push_back({"id_exec", FieldKind::Identity, {}, std::nullopt});
        cols.push_back({"id_cl", FieldKind::Identity, {}, std::nullopt});
        cat("bench", {"bayes", "terasort", "sort", "wordcount", "kmeans",
                      "pagerank", "dfsioe_read", "dfsioe_write"});
        cols.push_back({"exe_time", FieldKind::OutputTime, {}, std::nullopt});
        cat("net", {"ETH", "IB"});
        cat("disk", {"SSD", "HDD", "RR1", "RR2", "RR3"});
        num("maps", 2, 32);
        num("iosf", 1, 100);
        num("replicas", 1, 3);
        num("iofilebuf", 1024, 262144);
        cat("compression", {"None", "BZIP2", "ZLIB", "Snappy"});
        num("blk_size", 32, 256);
        num("datanodes", 1, 64);
        num("vm_cores", 1, 64);
        num("vm_ram", 1, 256);
        cols.push_back({"validated", FieldKind::Metadata, {}, std::nullopt});
        cols.push_back({"version", FieldKind::Metadata, {}, std::nullopt});
        return DatasetSchema(std::move(cols));
    }

  private:
    void validate() {
        index(/*require_output=*/true);
        for (const auto& c : columns_) {
            if (c.kind == FieldKind::CategoricalInput && c.values.empty())
                throw std::invalid_argument("schema: categorical column '" + c.name +
                                            "' has an empty value set");
        }
    }

    void index(bool require_output) {
        input_indices_.clear();
        identity_index_.reset();
        has_output_ = false;
        std::size_t outputs = 0;
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            for (std::size_t j = i + 1; j < columns_.size(); ++j)
                if (columns_[i].name == columns_[j].name)
                    throw std::invalid_argument("schema: duplicate column name '" +
                                                columns_[i].name + "'");
            switch (columns_[i].kind) {
                case FieldKind::OutputTime:
                    output_index_ = i;
                    ++outputs;
                    break;
                case FieldKind::Identity:
                    if (!identity_index_) identity_index_ = i;
                    break;
                case FieldKind::CategoricalInput:
                case FieldKind::NumericInput:
                    input_indices_.push_back(i);
                    break;
                case FieldKind::Metadata:
                    break;
            }
        }
        has_output_ = outputs > 0;
        if (require_output && outputs != 1)
            throw std::invalid_argument(
                "schema: exactly one column must have kind output_time");
        if (outputs > 1)
            throw std::invalid_argument("schema: more than one output_time column");
    }

    std::vector<ColumnSpec> columns_;
    std::vector<std::size_t> input_indices_;
    std::optional<std::size_t> identity_index_;
    std::size_t output_index_ = 0;
    bool has_output_ = false;
};

}  // namespace benchcast
