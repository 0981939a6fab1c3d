#pragma once

// CSV ingestion: comma-separated, first row is the header, UTF-8, no
// quoting. Missing cells are an error; column kinds are inferred (all
// cells numeric -> continuous) unless hints pin them. Nominal levels and
// class labels are coded in first-appearance order so runs reproduce
// without sorting assumptions.

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "irtens/dataset.hpp"

namespace irtens {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field.push_back(ch);
        }
    }
    out.push_back(field);
    return out;
}

inline bool parse_double(const std::string& s, double& value) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
    if (begin == end) return false;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    return ec == std::errc() && ptr == end;
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // cells[row][col]
};

inline RawTable read_raw_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open file: " + path);
    RawTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1) {
            t.header = split_csv_line(line);
            continue;
        }
        if (line.empty() && in.peek() == std::ifstream::traits_type::eof()) break;
        auto cells = split_csv_line(line);
        if (cells.size() != t.header.size()) {
            throw CsvError(path + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(t.header.size()) + " fields, found " +
                           std::to_string(cells.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (cells[c].empty()) {
                throw CsvError(path + ":" + std::to_string(line_no) + ": missing value in column '" +
                               t.header[c] + "'");
            }
        }
        t.rows.push_back(std::move(cells));
    }
    if (t.header.empty()) throw CsvError(path + ": empty file");
    return t;
}

inline int code_for(std::vector<std::string>& levels, const std::string& value) {
    for (std::size_t k = 0; k < levels.size(); ++k) {
        if (levels[k] == value) return static_cast<int>(k);
    }
    levels.push_back(value);
    return static_cast<int>(levels.size()) - 1;
}

}  // namespace detail

// Column kinds supplied by the caller, keyed by header name.
using SchemaHints = std::map<std::string, ColumnKind>;

inline Dataset load_csv(const std::string& path,
                        const std::optional<std::string>& label_column,
                        const SchemaHints& hints = {}) {
    const auto table = detail::read_raw_table(path);
    std::size_t label_idx = table.header.size();
    if (label_column) {
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (table.header[c] == *label_column) label_idx = c;
        }
        if (label_idx == table.header.size()) {
            throw CsvError(path + ": label column '" + *label_column + "' not found");
        }
    }
    Dataset d;
    d.name = path;
    d.n_rows = table.rows.size();
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c == label_idx) continue;
        ColumnSchema col;
        col.name = table.header[c];
        auto hint = hints.find(col.name);
        if (hint != hints.end()) {
            col.kind = hint->second;
        } else {
            col.kind = ColumnKind::Continuous;
            for (const auto& row : table.rows) {
                double v;
                if (!detail::parse_double(row[c], v)) {
                    col.kind = ColumnKind::Nominal;
                    break;
                }
            }
        }
        d.schema.push_back(std::move(col));
    }
    d.n_cols = d.schema.size();
    d.features.reserve(d.n_rows * d.n_cols);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        std::size_t fc = 0;
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (c == label_idx) continue;
            auto& col = d.schema[fc++];
            const std::string& cell = table.rows[r][c];
            if (col.kind == ColumnKind::Continuous) {
                double v;
                if (!detail::parse_double(cell, v)) {
                    throw CsvError(path + ":" + std::to_string(r + 2) + ": cannot parse '" + cell +
                                   "' as a number in column '" + col.name + "'");
                }
                d.features.push_back(v);
            } else {
                d.features.push_back(detail::code_for(col.levels, cell));
            }
        }
        if (label_column) {
            d.labels.push_back(detail::code_for(d.class_labels, table.rows[r][label_idx]));
        }
    }
    if (label_column && d.class_labels.size() < 2) {
        throw CsvError(path + ": fewer than 2 classes in label column '" + *label_column + "'");
    }
    return d;
}

// Load a CSV against a schema fixed at training time: columns are matched
// by name, nominal cells must use known levels, and the label column is
// optional (its absence yields an unlabeled dataset).
inline Dataset load_csv_with_schema(const std::string& path,
                                    const std::vector<ColumnSchema>& schema,
                                    const std::vector<std::string>& class_labels,
                                    const std::string& label_column) {
    const auto table = detail::read_raw_table(path);
    std::vector<std::size_t> source_col(schema.size());
    for (std::size_t s = 0; s < schema.size(); ++s) {
        bool found = false;
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (table.header[c] == schema[s].name) {
                source_col[s] = c;
                found = true;
            }
        }
        if (!found) {
            throw CsvError(path + ": column '" + schema[s].name +
                           "' required by the model is missing");
        }
    }
    std::size_t label_idx = table.header.size();
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (table.header[c] == label_column) label_idx = c;
    }
    Dataset d;
    d.name = path;
    d.n_rows = table.rows.size();
    d.n_cols = schema.size();
    d.schema = schema;
    d.features.reserve(d.n_rows * d.n_cols);
    const bool labeled = label_idx < table.header.size();
    if (labeled) d.class_labels = class_labels;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (std::size_t s = 0; s < schema.size(); ++s) {
            const std::string& cell = table.rows[r][source_col[s]];
            if (schema[s].kind == ColumnKind::Continuous) {
                double v;
                if (!detail::parse_double(cell, v)) {
                    throw CsvError(path + ":" + std::to_string(r + 2) + ": cannot parse '" + cell +
                                   "' as a number in column '" + schema[s].name + "'");
                }
                d.features.push_back(v);
            } else {
                int code = -1;
                for (std::size_t k = 0; k < schema[s].levels.size(); ++k) {
                    if (schema[s].levels[k] == cell) code = static_cast<int>(k);
                }
                if (code < 0) {
                    throw CsvError(path + ":" + std::to_string(r + 2) + ": level '" + cell +
                                   "' in column '" + schema[s].name +
                                   "' was not seen during training");
                }
                d.features.push_back(code);
            }
        }
        if (labeled) {
            const std::string& cell = table.rows[r][label_idx];
            int code = -1;
            for (std::size_t k = 0; k < class_labels.size(); ++k) {
                if (class_labels[k] == cell) code = static_cast<int>(k);
            }
            if (code < 0) {
                throw CsvError(path + ":" + std::to_string(r + 2) + ": class '" + cell +
                               "' was not seen during training");
            }
            d.labels.push_back(code);
        }
    }
    return d;
}

}  // namespace irtens
