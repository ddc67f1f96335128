#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "benchcast/rng.hpp"
#include "benchcast/schema.hpp"

namespace benchcast {

// Numeric columns (including the output time) hold doubles; everything else
// keeps the raw text.
using FieldValue = std::variant<double, std::string>;

inline bool field_equal(const FieldValue& a, const FieldValue& b) {
    return a == b;
}

// Canonical text form: shortest representation that parses back to the same
// double, so CSV save/load round-trips field-for-field.
inline std::string field_to_string(const FieldValue& v) {
    if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
    double d = std::get<double>(v);
    std::array<char, 32> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d);
    (void)ec;
    return std::string(buf.data(), p);
}

struct ExecutionRecord {
    std::vector<FieldValue> fields;  // aligned with the schema's columns

    double numeric(std::size_t col) const { return std::get<double>(fields.at(col)); }
    const std::string& text(std::size_t col) const {
        return std::get<std::string>(fields.at(col));
    }
};

struct RowError {
    std::size_t line = 0;  // 1-based line number in the source file
    std::string message;
};

class Dataset {
  public:
    Dataset() = default;
    Dataset(DatasetSchema schema, std::vector<ExecutionRecord> records,
            std::string provenance = {})
        : schema_(std::move(schema)),
          records_(std::move(records)),
          provenance_(std::move(provenance)) {
        check_ids();
    }

    const DatasetSchema& schema() const { return schema_; }
    const std::string& provenance() const { return provenance_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const ExecutionRecord& record(std::size_t i) const { return records_.at(i); }
    const std::vector<ExecutionRecord>& records() const { return records_; }

    double exe_time(std::size_t row) const {
        return records_.at(row).numeric(schema_.output_index());
    }

    std::string id(std::size_t row) const {
        auto idx = schema_.identity_index();
        if (idx) return records_.at(row).text(*idx);
        return std::to_string(row + 1);
    }

    // Review flag: a record counts as validated unless a metadata column
    // named "validated" says otherwise.
    bool validated(std::size_t row) const {
        auto idx = schema_.find("validated");
        if (!idx || schema_.column(*idx).kind != FieldKind::Metadata) return true;
        const std::string& v = records_.at(row).text(*idx);
        return !(v == "0" || v == "false" || v == "no");
    }

    std::vector<std::size_t> all_rows() const {
        std::vector<std::size_t> rows(records_.size());
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        return rows;
    }

    std::vector<std::size_t> validated_rows(std::span<const std::size_t> rows) const {
        std::vector<std::size_t> out;
        out.reserve(rows.size());
        for (std::size_t r : rows)
            if (validated(r)) out.push_back(r);
        return out;
    }

  private:
    void check_ids() const {
        if (!schema_.identity_index()) return;
        std::unordered_set<std::string> seen;
        for (std::size_t i = 0; i < records_.size(); ++i) {
            if (!seen.insert(id(i)).second)
                throw std::invalid_argument("dataset: duplicate record id '" + id(i) +
                                            "'");
        }
    }

    DatasetSchema schema_;
    std::vector<ExecutionRecord> records_;
    std::string provenance_;
};

struct LoadResult {
    Dataset dataset;
    std::vector<RowError> row_errors;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim surrounding whitespace and symmetric quotes
        std::size_t b = cell.find_first_not_of(" \t\r");
        std::size_t e = cell.find_last_not_of(" \t\r");
        cell = b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1);
        if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"')
            cell = cell.substr(1, cell.size() - 2);
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

inline bool parse_double(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [p, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && p == last && std::isfinite(out);
}

// Parses one data row against `schema` (whose columns correspond to the file
// columns via `file_cols`, indices into the full record layout of `target`).
// On success appends a record aligned with `target`.
inline bool parse_row(const DatasetSchema& target,
                      const std::vector<std::size_t>& file_cols,
                      const std::vector<std::string>& cells, std::size_t line,
                      std::vector<ExecutionRecord>& out,
                      std::vector<RowError>& errors) {
    if (cells.size() != file_cols.size()) {
        errors.push_back({line, "expected " + std::to_string(file_cols.size()) +
                                    " fields, got " + std::to_string(cells.size())});
        return false;
    }
    ExecutionRecord rec;
    rec.fields.resize(target.size(), std::string{});
    for (std::size_t c = 0; c < file_cols.size(); ++c) {
        const ColumnSpec& col = target.column(file_cols[c]);
        const std::string& cell = cells[c];
        switch (col.kind) {
            case FieldKind::NumericInput:
            case FieldKind::OutputTime: {
                double v = 0;
                if (!parse_double(cell, v)) {
                    errors.push_back({line, col.name + ": not a number: '" + cell + "'"});
                    return false;
                }
                if (col.kind == FieldKind::OutputTime && v <= 0) {
                    errors.push_back({line, "OutputTime must be positive"});
                    return false;
                }
                if (col.bounds && (v < col.bounds->first || v > col.bounds->second)) {
                    errors.push_back({line, col.name + ": value " + cell +
                                                " outside bounds [" +
                                                field_to_string(col.bounds->first) + ", " +
                                                field_to_string(col.bounds->second) + "]"});
                    return false;
                }
                rec.fields[file_cols[c]] = v;
                break;
            }
            case FieldKind::CategoricalInput: {
                if (!target.allows_category(file_cols[c], cell)) {
                    errors.push_back(
                        {line, col.name + ": value '" + cell + "' not in allowed set"});
                    return false;
                }
                rec.fields[file_cols[c]] = cell;
                break;
            }
            case FieldKind::Identity:
            case FieldKind::Metadata:
                rec.fields[file_cols[c]] = cell;
                break;
        }
    }
    out.push_back(std::move(rec));
    return true;
}

inline LoadResult load_csv_impl(const std::filesystem::path& path,
                                const DatasetSchema& schema, bool subset_ok) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_csv: cannot open file: " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("load_csv: empty file (no header row): " +
                                 path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split_csv_line(line);

    // Map header columns onto the schema. Strict mode requires exact match;
    // subset mode accepts any column subset that still covers every input.
    std::vector<std::size_t> file_cols;
    if (!subset_ok) {
        if (header.size() != schema.size())
            throw std::runtime_error("load_csv: header has " +
                                     std::to_string(header.size()) + " columns, schema has " +
                                     std::to_string(schema.size()));
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] != schema.column(i).name)
                throw std::runtime_error("load_csv: header column '" + header[i] +
                                         "' does not match schema column '" +
                                         schema.column(i).name + "'");
            file_cols.push_back(i);
        }
    } else {
        for (const auto& name : header) {
            auto idx = schema.find(name);
            if (!idx)
                throw std::runtime_error("load_csv: unknown column '" + name + "'");
            file_cols.push_back(*idx);
        }
        for (std::size_t i : schema.input_indices()) {
            if (std::find(file_cols.begin(), file_cols.end(), i) == file_cols.end())
                throw std::runtime_error("load_csv: configuration column '" +
                                         schema.column(i).name + "' missing from header");
        }
    }

    // Reduced layout: drop schema columns the file does not carry.
    DatasetSchema target = schema;
    bool reduced = subset_ok && file_cols.size() != schema.size();
    if (reduced) {
        std::vector<std::size_t> keep = file_cols;
        std::sort(keep.begin(), keep.end());
        target = schema.project(keep);
        for (auto& fc : file_cols) {
            auto it = std::find(keep.begin(), keep.end(), fc);
            fc = static_cast<std::size_t>(it - keep.begin());
        }
    }

    std::vector<ExecutionRecord> records;
    std::vector<RowError> errors;
    std::unordered_set<std::string> seen_ids;
    std::size_t line_no = 1;
    std::size_t data_rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++data_rows;
        std::vector<std::string> cells = split_csv_line(line);
        if (!parse_row(target, file_cols, cells, line_no, records, errors)) continue;
        if (auto idc = target.identity_index()) {
            const std::string& rid = records.back().text(*idc);
            if (!seen_ids.insert(rid).second) {
                errors.push_back({line_no, "duplicate record id '" + rid + "'"});
                records.pop_back();
            }
        }
    }

    if (data_rows > 0 && errors.size() * 2 > data_rows)
        throw std::runtime_error("load_csv: " + std::to_string(errors.size()) + " of " +
                                 std::to_string(data_rows) +
                                 " rows failed validation; file does not match schema");

    return LoadResult{Dataset(std::move(target), std::move(records), path.string()),
                      std::move(errors)};
}

}  // namespace detail

// Strict loader: the header must match the schema column-for-column. Rows
// that violate the schema are reported with their line numbers and excluded;
// if more than half the rows fail, the whole load is treated as a schema
// mismatch and aborts.
inline LoadResult load_csv(const std::filesystem::path& path,
                           const DatasetSchema& schema) {
    return detail::load_csv_impl(path, schema, /*subset_ok=*/false);
}

// Lax loader for configuration files: the header may omit identity, output
// and metadata columns, but must cover every input column. The resulting
// dataset carries the correspondingly reduced schema.
inline LoadResult load_config_csv(const std::filesystem::path& path,
                                  const DatasetSchema& schema) {
    return detail::load_csv_impl(path, schema, /*subset_ok=*/true);
}

inline void save_csv(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_csv: cannot open file for writing: " +
                                 path.string());
    const DatasetSchema& s = ds.schema();
    for (std::size_t i = 0; i < s.size(); ++i)
        out << (i ? "," : "") << s.column(i).name;
    out << "\n";
    for (std::size_t r = 0; r < ds.size(); ++r) {
        const auto& rec = ds.record(r);
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::string cell = field_to_string(rec.fields[i]);
            // keep observed times visibly fractional
            if (i == s.output_index() && cell.find('.') == std::string::npos &&
                cell.find('e') == std::string::npos)
                cell += ".0";
            out << (i ? "," : "") << cell;
        }
        out << "\n";
    }
}

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
    std::uint64_t seed = 0;
    std::array<double, 3> fractions{};
};

// Random partition of an index list into train/validation/test. Validation
// and test get floor(fraction * n) rows each; the remainder goes to train.
inline SplitIndices split_rows(std::span<const std::size_t> rows,
                               std::array<double, 3> fractions,
                               std::uint64_t seed) {
    if (rows.empty()) throw std::invalid_argument("split: dataset is empty");
    double sum = fractions[0] + fractions[1] + fractions[2];
    if (fractions[0] <= 0 || fractions[1] <= 0 || fractions[2] <= 0 ||
        std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument(
            "split: fractions must be positive and sum to 1");

    std::size_t n = rows.size();
    auto n_val = static_cast<std::size_t>(std::floor(fractions[1] * static_cast<double>(n)));
    auto n_test = static_cast<std::size_t>(std::floor(fractions[2] * static_cast<double>(n)));
    std::size_t n_train = n - n_val - n_test;

    std::vector<std::size_t> shuffled(rows.begin(), rows.end());
    Rng rng(seed);
    rng.shuffle(shuffled);

    SplitIndices out;
    out.seed = seed;
    out.fractions = fractions;
    out.train.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.validation.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_train),
                          shuffled.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    out.test.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_train + n_val),
                    shuffled.end());
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.validation.begin(), out.validation.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

inline SplitIndices split(const Dataset& ds, std::array<double, 3> fractions,
                          std::uint64_t seed) {
    auto rows = ds.all_rows();
    return split_rows(rows, fractions, seed);
}

inline Dataset filter_benchmark(const Dataset& ds, const std::string& bench) {
    auto bcol = ds.schema().benchmark_index();
    if (!bcol)
        throw std::invalid_argument("filter_benchmark: schema has no 'bench' column");
    if (!ds.schema().allows_category(*bcol, bench))
        throw std::invalid_argument("filter_benchmark: unknown benchmark '" + bench +
                                    "'");
    std::vector<ExecutionRecord> kept;
    for (const auto& rec : ds.records())
        if (rec.text(*bcol) == bench) kept.push_back(rec);
    return Dataset(ds.schema(), std::move(kept),
                   ds.provenance() + " [bench=" + bench + "]");
}

// Distinct benchmark values present in the dataset, in schema value order.
inline std::vector<std::string> benchmarks_present(const Dataset& ds) {
    auto bcol = ds.schema().benchmark_index();
    if (!bcol) return {};
    std::vector<std::string> out;
    for (const auto& value : ds.schema().column(*bcol).values) {
        for (const auto& rec : ds.records()) {
            if (rec.text(*bcol) == value) {
                out.push_back(value);
                break;
            }
        }
    }
    return out;
}

}  // namespace benchcast
