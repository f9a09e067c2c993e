#pragma once

#include <charconv>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "streamcore/ast.hpp"
#include "streamcore/trace.hpp"

namespace streamcore {

/// Malformed trace data (CSV or JSON lines). Carries the 1-based line number.
class TraceFormatError : public std::runtime_error {
public:
    TraceFormatError(size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

    size_t line() const { return line_; }

private:
    size_t line_;
};

/// Serialized form of a finite trace: named columns, one row per time point,
/// an empty cell meaning absent. Rows are rectangular.
struct TraceFile {
    std::vector<std::string> header;          // stream names, file order
    std::vector<std::vector<OptValue>> rows;  // rows[n][i] = stream i at time n

    size_t horizon() const { return rows.size(); }

    bool has_stream(const std::string& name) const {
        for (const auto& h : header)
            if (h == name) return true;
        return false;
    }

    friend bool operator==(const TraceFile&, const TraceFile&) = default;
};

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> cells;
    size_t start = 0;
    for (size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            cells.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return cells;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline Value parse_cell_value(std::string_view cell, size_t line) {
    Value v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw TraceFormatError(line, "cell '" + std::string(cell) + "' is not an integer");
    return v;
}

}  // namespace detail

/// Reads the CSV trace format: header `time,<stream>...`, then one row per
/// time point with the time column counting 0,1,2,... without gaps; an empty
/// cell is an absent value.
inline TraceFile read_csv_trace(std::string_view text) {
    TraceFile file;
    std::vector<std::string_view> lines;
    size_t start = 0;
    for (size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            lines.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    // A trailing newline produces one empty trailing fragment; drop it.
    while (!lines.empty() && detail::trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw TraceFormatError(1, "missing header row");

    auto header_cells = detail::split_csv_line(detail::trim(lines[0]));
    if (header_cells.empty() || detail::trim(header_cells[0]) != "time")
        throw TraceFormatError(1, "first header column must be 'time'");
    std::set<std::string> seen;
    for (size_t i = 1; i < header_cells.size(); ++i) {
        std::string name(detail::trim(header_cells[i]));
        if (!is_identifier(name))
            throw TraceFormatError(1, "invalid stream name '" + name + "'");
        if (!seen.insert(name).second)
            throw TraceFormatError(1, "duplicate stream column '" + name + "'");
        file.header.push_back(std::move(name));
    }

    for (size_t li = 1; li < lines.size(); ++li) {
        const size_t line_no = li + 1;
        auto cells = detail::split_csv_line(detail::trim(lines[li]));
        if (cells.size() != header_cells.size())
            throw TraceFormatError(line_no, "expected " + std::to_string(header_cells.size()) +
                                                " cells, got " + std::to_string(cells.size()));
        Value t = detail::parse_cell_value(detail::trim(cells[0]), line_no);
        if (t != static_cast<Value>(li - 1))
            throw TraceFormatError(line_no, "time column must count up from 0 without gaps "
                                            "(expected " +
                                                std::to_string(li - 1) + ", got " +
                                                std::to_string(t) + ")");
        std::vector<OptValue> row;
        for (size_t i = 1; i < cells.size(); ++i) {
            auto cell = detail::trim(cells[i]);
            if (cell.empty())
                row.push_back(std::nullopt);
            else
                row.push_back(detail::parse_cell_value(cell, line_no));
        }
        file.rows.push_back(std::move(row));
    }
    return file;
}

inline std::string write_csv_trace(const TraceFile& file) {
    std::string out = "time";
    for (const auto& name : file.header) out += "," + name;
    out += "\n";
    for (size_t n = 0; n < file.rows.size(); ++n) {
        out += std::to_string(n);
        for (const auto& cell : file.rows[n]) {
            out += ",";
            if (cell.has_value()) out += std::to_string(*cell);
        }
        out += "\n";
    }
    return out;
}

/// Reads the JSON-lines trace format: one object per line, of the form
/// `{"time": n, "values": {"stream": 42, ...}}`. Streams never mentioned are
/// all-absent columns; rows must cover times 0,1,2,... in order.
inline TraceFile read_jsonl_trace(std::string_view text) {
    TraceFile file;
    std::map<std::string, size_t> column_of;
    std::vector<std::map<size_t, Value>> sparse_rows;

    size_t start = 0, line_no = 0;
    for (size_t i = 0; i <= text.size(); ++i) {
        if (i != text.size() && text[i] != '\n') continue;
        std::string_view line = detail::trim(text.substr(start, i - start));
        start = i + 1;
        ++line_no;
        if (line.empty()) continue;

        nlohmann::json row = nlohmann::json::parse(line, nullptr, false);
        if (row.is_discarded() || !row.is_object())
            throw TraceFormatError(line_no, "not a JSON object");
        if (!row.contains("time") || !row["time"].is_number_integer())
            throw TraceFormatError(line_no, "missing integer 'time' field");
        if (row["time"].get<Value>() != static_cast<Value>(sparse_rows.size()))
            throw TraceFormatError(line_no, "time must count up from 0 without gaps");
        if (!row.contains("values") || !row["values"].is_object())
            throw TraceFormatError(line_no, "missing 'values' object");

        std::map<size_t, Value> cells;
        for (auto& [name, value] : row["values"].items()) {
            if (!is_identifier(name))
                throw TraceFormatError(line_no, "invalid stream name '" + name + "'");
            if (!value.is_number_integer())
                throw TraceFormatError(line_no, "value of '" + name + "' is not an integer");
            auto [it, inserted] = column_of.emplace(name, column_of.size());
            if (inserted) file.header.push_back(name);
            cells[it->second] = value.get<Value>();
        }
        sparse_rows.push_back(std::move(cells));
    }

    for (const auto& sparse : sparse_rows) {
        std::vector<OptValue> row(file.header.size(), std::nullopt);
        for (const auto& [col, v] : sparse) row[col] = v;
        file.rows.push_back(std::move(row));
    }
    return file;
}

/// Resolves a trace file against a specification's declared streams.
/// Unknown names are rejected; names resolve to input or output columns.
inline StreamTrace to_stream_trace(const TraceFile& file, const Specification& spec) {
    StreamTrace trace(file.horizon());
    for (size_t i = 0; i < file.header.size(); ++i) {
        const std::string& name = file.header[i];
        StreamVar var;
        if (spec.has_input(name))
            var = input_var(name);
        else if (spec.find_equation(name))
            var = output_var(name);
        else
            throw TraceFormatError(1, "stream '" + name + "' is not declared in the specification");
        StreamTrace::Column col(file.horizon());
        for (size_t n = 0; n < file.rows.size(); ++n) col[n] = file.rows[n][i];
        trace.set_column(var, std::move(col));
    }
    return trace;
}

/// Serializes a run result in declaration order: inputs first, then outputs
/// in equation order.
inline TraceFile to_trace_file(const StreamTrace& trace, const Specification& spec) {
    TraceFile file;
    std::vector<StreamVar> order;
    for (const auto& in : spec.inputs)
        if (trace.contains(in)) {
            order.push_back(in);
            file.header.push_back(in.name);
        }
    for (const auto& eq : spec.equations)
        if (trace.contains(eq.target)) {
            order.push_back(eq.target);
            file.header.push_back(eq.target.name);
        }
    file.rows.resize(trace.horizon());
    for (size_t n = 0; n < trace.horizon(); ++n) {
        file.rows[n].reserve(order.size());
        for (const auto& var : order) file.rows[n].push_back(trace.at(var, n));
    }
    return file;
}

}  // namespace streamcore
