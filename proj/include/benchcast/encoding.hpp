#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "benchcast/dataset.hpp"

namespace benchcast {

// One column of the encoded design matrix. Categorical source columns expand
// into one indicator column per allowed value; numeric source columns map to
// a single z-scored column.
struct EncodedColumn {
    std::string source;    // source column name in the fitted schema
    std::string category;  // empty for numeric columns
    double mean = 0.0;
    double stdev = 1.0;
};

struct EncodedMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // row-major
    std::vector<EncodedColumn> columns;

    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(data).subspan(r * cols, cols);
    }
};

struct EncodeStats {
    std::size_t unknown_categories = 0;
};

// Maps column indices of the schema an encoder (or model) was fitted on to
// column indices of the dataset being evaluated, by name.
struct SchemaBinding {
    std::vector<std::size_t> map;  // fitted column index -> dataset column index
};

inline SchemaBinding bind_columns(const DatasetSchema& fitted,
                                  const DatasetSchema& data,
                                  const std::vector<std::size_t>& fitted_cols) {
    SchemaBinding b;
    b.map.resize(fitted.size(), static_cast<std::size_t>(-1));
    for (std::size_t i : fitted_cols) {
        auto idx = data.find(fitted.column(i).name);
        if (!idx)
            throw std::invalid_argument("schema mismatch: data has no column '" +
                                        fitted.column(i).name + "'");
        b.map[i] = *idx;
    }
    return b;
}

// Mixed-type feature encoder: one-hot for categorical inputs, z-score for
// numeric inputs. Normalization statistics come from the fit rows only;
// zero-variance columns keep stdev 1 so they pass through as constant 0.
class Encoder {
  public:
    Encoder() = default;

    static Encoder fit(const Dataset& ds, std::span<const std::size_t> fit_rows) {
        if (fit_rows.empty())
            throw std::invalid_argument("encode: fit_rows must be non-empty");
        Encoder enc;
        enc.schema_ = ds.schema();
        const DatasetSchema& s = enc.schema_;
        for (std::size_t ci : s.input_indices()) {
            const ColumnSpec& col = s.column(ci);
            if (col.kind == FieldKind::CategoricalInput) {
                for (const auto& value : col.values)
                    enc.columns_.push_back({col.name, value, 0.0, 1.0});
            } else {
                double mean = 0.0;
                for (std::size_t r : fit_rows) mean += ds.record(r).numeric(ci);
                mean /= static_cast<double>(fit_rows.size());
                double var = 0.0;
                for (std::size_t r : fit_rows) {
                    double d = ds.record(r).numeric(ci) - mean;
                    var += d * d;
                }
                var /= static_cast<double>(fit_rows.size());
                double stdev = std::sqrt(var);
                if (stdev == 0.0) stdev = 1.0;
                enc.columns_.push_back({col.name, "", mean, stdev});
            }
            enc.source_cols_.push_back(ci);
        }
        return enc;
    }

    std::size_t width() const { return columns_.size(); }
    const std::vector<EncodedColumn>& columns() const { return columns_; }
    const DatasetSchema& schema() const { return schema_; }

    SchemaBinding bind(const DatasetSchema& data) const {
        return bind_columns(schema_, data, source_cols_);
    }

    // Encodes one record into `out` (resized to width()). Unknown categories
    // leave their one-hot group all-zero and are counted in `stats`; strict
    // mode raises instead.
    void transform_row(const Dataset& ds, std::size_t row, const SchemaBinding& b,
                       std::vector<double>& out, EncodeStats* stats = nullptr,
                       bool strict = false) const {
        out.assign(width(), 0.0);
        std::size_t ec = 0;
        for (std::size_t ci : source_cols_) {
            const ColumnSpec& col = schema_.column(ci);
            std::size_t dcol = b.map[ci];
            if (col.kind == FieldKind::CategoricalInput) {
                const std::string& value = ds.record(row).text(dcol);
                bool found = false;
                for (std::size_t v = 0; v < col.values.size(); ++v) {
                    if (col.values[v] == value) {
                        out[ec + v] = 1.0;
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    if (strict)
                        throw std::invalid_argument("encode: category '" + value +
                                                    "' not in schema for column '" +
                                                    col.name + "'");
                    if (stats) ++stats->unknown_categories;
                }
                ec += col.values.size();
            } else {
                double v = ds.record(row).numeric(dcol);
                out[ec] = (v - columns_[ec].mean) / columns_[ec].stdev;
                ++ec;
            }
        }
    }

    EncodedMatrix transform(const Dataset& ds, std::span<const std::size_t> rows,
                            EncodeStats* stats = nullptr, bool strict = false) const {
        SchemaBinding b = bind(ds.schema());
        EncodedMatrix m;
        m.rows = rows.size();
        m.cols = width();
        m.columns = columns_;
        m.data.resize(m.rows * m.cols);
        std::vector<double> tmp;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            transform_row(ds, rows[i], b, tmp, stats, strict);
            std::copy(tmp.begin(), tmp.end(), m.data.begin() + static_cast<std::ptrdiff_t>(i * m.cols));
        }
        return m;
    }

    nlohmann::json to_json() const {
        nlohmann::json cols = nlohmann::json::array();
        for (const auto& c : columns_)
            cols.push_back({{"source", c.source},
                            {"category", c.category},
                            {"mean", c.mean},
                            {"stdev", c.stdev}});
        return nlohmann::json{{"columns", cols}, {"schema", schema_.to_json()}};
    }

    static Encoder from_json(const nlohmann::json& j) {
        Encoder enc;
        enc.schema_ = DatasetSchema::from_json(j.at("schema"));
        for (const auto& jc : j.at("columns"))
            enc.columns_.push_back({jc.at("source").get<std::string>(),
                                    jc.at("category").get<std::string>(),
                                    jc.at("mean").get<double>(),
                                    jc.at("stdev").get<double>()});
        enc.source_cols_ = enc.schema_.input_indices();
        return enc;
    }

  private:
    DatasetSchema schema_;
    std::vector<EncodedColumn> columns_;
    std::vector<std::size_t> source_cols_;
};

// Fit on fit_rows, encode rows. Strict: any category outside the schema is
// an error here (training path); prediction paths use Encoder directly and
// degrade unknown categories to an all-zero group.
inline EncodedMatrix encode(const Dataset& ds, std::span<const std::size_t> rows,
                            std::span<const std::size_t> fit_rows) {
    Encoder enc = Encoder::fit(ds, fit_rows);
    return enc.transform(ds, rows, nullptr, /*strict=*/true);
}

}  // namespace benchcast
