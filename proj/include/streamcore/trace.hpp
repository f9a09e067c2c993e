#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "streamcore/core.hpp"

namespace streamcore {

/// A finite prefix of a stream map: one optional-value column of length
/// `horizon` per variable. Time indices run 0..horizon-1.
class StreamTrace {
public:
    using Column = std::vector<OptValue>;

    StreamTrace() = default;
    explicit StreamTrace(size_t horizon) : horizon_(horizon) {}

    size_t horizon() const { return horizon_; }
    const std::map<StreamVar, Column>& columns() const { return columns_; }
    bool contains(const StreamVar& var) const { return columns_.count(var) > 0; }
    bool empty() const { return columns_.empty(); }

    void set_column(const StreamVar& var, Column column) {
        if (column.size() != horizon_)
            throw std::invalid_argument("column length " + std::to_string(column.size()) +
                                        " does not match horizon " +
                                        std::to_string(horizon_));
        columns_[var] = std::move(column);
    }

    const Column& column(const StreamVar& var) const {
        auto it = columns_.find(var);
        if (it == columns_.end())
            throw std::out_of_range("no column for " + std::string(to_string(var.kind)) +
                                    " stream '" + var.name + "'");
        return it->second;
    }

    OptValue at(const StreamVar& var, size_t n) const {
        const Column& col = column(var);
        if (n >= col.size()) throw std::out_of_range("time index out of range");
        return col[n];
    }

    /// Restriction of this trace to the given variables (missing ones are
    /// skipped, not invented).
    StreamTrace restricted_to(std::span<const StreamVar> vars) const {
        StreamTrace out(horizon_);
        for (const auto& v : vars) {
            auto it = columns_.find(v);
            if (it != columns_.end()) out.set_column(v, it->second);
        }
        return out;
    }

    friend bool operator==(const StreamTrace&, const StreamTrace&) = default;

private:
    size_t horizon_ = 0;
    std::map<StreamVar, Column> columns_;
};

/// Left-biased union of two traces over the same horizon: where both define
/// a column, the left one wins.
inline StreamTrace join_traces(const StreamTrace& a, const StreamTrace& b) {
    if (a.horizon() != b.horizon())
        throw std::invalid_argument("cannot join traces of horizon " +
                                    std::to_string(a.horizon()) + " and " +
                                    std::to_string(b.horizon()));
    StreamTrace out = a;
    for (const auto& [var, col] : b.columns())
        if (!out.contains(var)) out.set_column(var, col);
    return out;
}

}  // namespace streamcore
