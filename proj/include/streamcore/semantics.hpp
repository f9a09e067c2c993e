#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "streamcore/ast.hpp"
#include "streamcore/pacing.hpp"
#include "streamcore/trace.hpp"

namespace streamcore {

// ---------------------------------------------------------------------------
// Stream operators
// ---------------------------------------------------------------------------

/// The value of the stream at time n, failing when it is absent.
inline EvalOutcome op_sync(std::span<const OptValue> w, size_t n) {
    if (n >= w.size()) throw std::out_of_range("op_sync: index out of range");
    if (w[n].has_value()) return EvalOutcome::ok(*w[n]);
    return EvalOutcome::fail();
}

/// The most recent defined value at index <= n, failing when none exists.
inline EvalOutcome op_last(std::span<const OptValue> w, size_t n) {
    if (n >= w.size()) throw std::out_of_range("op_last: index out of range");
    for (size_t i = n + 1; i-- > 0;)
        if (w[i].has_value()) return EvalOutcome::ok(*w[i]);
    return EvalOutcome::fail();
}

/// Last defined value at index <= n, or the default when none exists.
inline EvalOutcome op_hold(std::span<const OptValue> w, size_t n, EvalOutcome d) {
    EvalOutcome last = op_last(w, n);
    return last.is_fail() ? d : last;
}

/// Previous defined value relative to a current one: fails when the stream is
/// absent at n; otherwise yields the last defined value strictly before n, or
/// the default on the stream's first occurrence.
inline EvalOutcome op_prev(std::span<const OptValue> w, size_t n, EvalOutcome d) {
    if (n >= w.size()) throw std::out_of_range("op_prev: index out of range");
    if (!w[n].has_value()) return EvalOutcome::fail();
    if (n == 0) return d;
    EvalOutcome last = op_last(w, n - 1);
    return last.is_fail() ? d : last;
}

// ---------------------------------------------------------------------------
// Expression evaluation
// ---------------------------------------------------------------------------

inline Value apply_binop(BinaryOp op, Value a, Value b) {
    switch (op) {
        case BinaryOp::Add: return checked_add(a, b);
        case BinaryOp::Sub: return checked_sub(a, b);
        case BinaryOp::Mul: return checked_mul(a, b);
        case BinaryOp::Div: return checked_div(a, b);
        case BinaryOp::Eq: return a == b ? 1 : 0;
        case BinaryOp::Lt: return a < b ? 1 : 0;
        case BinaryOp::Gt: return a > b ? 1 : 0;
        case BinaryOp::And: return (a != 0 && b != 0) ? 1 : 0;
        case BinaryOp::Or: return (a != 0 || b != 0) ? 1 : 0;
    }
    throw std::logic_error("unknown binary operator");
}

/// The last defined value of a stream, or no value at all. Used by the
/// memory-cell semantics and the online evaluator for self references.
struct MemoryCell {
    std::optional<Value> last;

    static MemoryCell no_value() { return {}; }
    static MemoryCell val(Value v) { return {v}; }
    bool has_value() const { return last.has_value(); }
    Value value() const { return *last; }

    friend bool operator==(const MemoryCell&, const MemoryCell&) = default;
};

namespace detail {

// One recursion for all three expression semantics. Mode selects how stream
// accesses resolve; the arithmetic and the strict failure lifting are shared.
enum class EvalMode { Total, Partial, MemCell };

struct EvalEnv {
    const StreamTrace& rho;
    size_t n;
    EvalMode mode;
    const StreamVar* self = nullptr;  // MemCell only
    MemoryCell cell;                  // MemCell only
};

inline EvalOutcome eval_expr(const ExprPtr& e, const EvalEnv& env);

// Resolves whether an access target is readable in the current mode.
// Returns the column, or nullptr when the access must fail (missing output
// in partial/mem-cell mode). Throws when an input column is missing, which
// is a caller error in every mode.
inline const StreamTrace::Column* resolve_column(const StreamVar& target, const EvalEnv& env) {
    if (env.rho.contains(target)) return &env.rho.column(target);
    if (target.kind == VarKind::Input || env.mode == EvalMode::Total)
        env.rho.column(target);  // throws with a useful message
    return nullptr;
}

inline EvalOutcome eval_expr(const ExprPtr& e, const EvalEnv& env) {
    return std::visit(
        overload{
            [&](const ConstExpr& c) { return EvalOutcome::ok(c.value); },
            [&](const VarExpr& v) {
                if (env.mode == EvalMode::MemCell && v.var == *env.self)
                    return EvalOutcome::fail();
                const auto* col = resolve_column(v.var, env);
                if (!col) return EvalOutcome::fail();
                return op_sync(*col, env.n);
            },
            [&](const PrevExpr& p) {
                if (env.mode == EvalMode::MemCell && p.target == *env.self) {
                    // Self reference: the cell holds the last defined value of
                    // the stream's own past; the default covers the first step
                    // and the no-value-yet case.
                    if (env.n > 0 && env.cell.has_value())
                        return EvalOutcome::ok(env.cell.value());
                    return eval_expr(p.def, env);
                }
                const auto* col = resolve_column(p.target, env);
                if (!col) return EvalOutcome::fail();
                if (!(*col)[env.n].has_value()) return EvalOutcome::fail();
                if (env.n > 0) {
                    EvalOutcome last = op_last(*col, env.n - 1);
                    if (last.is_ok()) return last;
                }
                return eval_expr(p.def, env);
            },
            [&](const HoldExpr& h) {
                if (env.mode == EvalMode::MemCell && h.target == *env.self)
                    return EvalOutcome::fail();
                const auto* col = resolve_column(h.target, env);
                if (!col) return EvalOutcome::fail();
                EvalOutcome last = op_last(*col, env.n);
                if (last.is_ok()) return last;
                return eval_expr(h.def, env);
            },
            [&](const BinOpExpr& b) {
                EvalOutcome lhs = eval_expr(b.lhs, env);
                EvalOutcome rhs = eval_expr(b.rhs, env);
                if (lhs.is_fail() || rhs.is_fail()) return EvalOutcome::fail();
                return EvalOutcome::ok(apply_binop(b.op, lhs.value(), rhs.value()));
            },
            [&](const NotExpr& nt) {
                EvalOutcome v = eval_expr(nt.operand, env);
                if (v.is_fail()) return EvalOutcome::fail();
                return EvalOutcome::ok(v.value() == 0 ? 1 : 0);
            },
        },
        e->node());
}

}  // namespace detail

/// Denotation of an expression over a trace covering every referenced stream.
inline EvalOutcome eval_total(const ExprPtr& e, const StreamTrace& rho, size_t n) {
    if (n >= rho.horizon()) throw std::out_of_range("eval_total: time index out of range");
    return detail::eval_expr(e, {rho, n, detail::EvalMode::Total, nullptr, {}});
}

/// Denotation under a partial map: any access to an output stream missing
/// from rho fails. Defaults do not rescue a missing stream.
inline EvalOutcome eval_partial(const ExprPtr& e, const StreamTrace& rho, size_t n) {
    if (n >= rho.horizon()) throw std::out_of_range("eval_partial: time index out of range");
    return detail::eval_expr(e, {rho, n, detail::EvalMode::Partial, nullptr, {}});
}

/// Denotation under a partial map plus a named memory cell for `self`:
/// direct and hold accesses to self fail, while prev accesses to self read
/// the cell (or the default at the first step / while the cell is empty).
inline EvalOutcome eval_memcell(const ExprPtr& e, const StreamTrace& rho, size_t n,
                                const StreamVar& self, MemoryCell cell) {
    if (self.kind != VarKind::Output)
        throw std::invalid_argument("eval_memcell: self must be an output stream");
    if (rho.contains(self))
        throw std::invalid_argument("eval_memcell: rho must not contain self");
    if (n >= rho.horizon()) throw std::out_of_range("eval_memcell: time index out of range");
    return detail::eval_expr(e, {rho, n, detail::EvalMode::MemCell, &self, cell});
}

// ---------------------------------------------------------------------------
// Model membership
// ---------------------------------------------------------------------------

struct ModelViolation {
    enum class Reason {
        ExpectedValueMismatch,
        OutputAbsentAtPacedTime,
        ExprFailedAtPacedTime,
    };

    StreamVar output;
    size_t time = 0;
    Reason reason = Reason::ExpectedValueMismatch;

    friend bool operator==(const ModelViolation&, const ModelViolation&) = default;
};

inline const char* to_string(ModelViolation::Reason r) {
    switch (r) {
        case ModelViolation::Reason::ExpectedValueMismatch: return "ExpectedValueMismatch";
        case ModelViolation::Reason::OutputAbsentAtPacedTime: return "OutputAbsentAtPacedTime";
        case ModelViolation::Reason::ExprFailedAtPacedTime: return "ExprFailedAtPacedTime";
    }
    return "?";
}

struct ModelReport {
    bool is_model = true;
    std::vector<ModelViolation> violations;
};

/// Checks whether `rho` (total over inputs and all equation targets) is a
/// model of the specification: at every paced time point of every equation,
/// the output must carry exactly the value of its body. Values outside paced
/// times are unconstrained.
inline ModelReport is_model(const StreamTrace& rho, const Specification& spec) {
    ModelReport report;
    StreamTrace input_part = rho.restricted_to(spec.inputs);
    for (const auto& in : spec.inputs)
        input_part.column(in);  // throws if an input column is missing

    for (const auto& eq : spec.equations) {
        for (size_t n : denotation_times(eq.pacing, input_part)) {
            OptValue actual = rho.at(eq.target, n);
            if (!actual.has_value()) {
                report.violations.push_back(
                    {eq.target, n, ModelViolation::Reason::OutputAbsentAtPacedTime});
                continue;
            }
            EvalOutcome expected = eval_total(eq.body, rho, n);
            if (expected.is_fail()) {
                report.violations.push_back(
                    {eq.target, n, ModelViolation::Reason::ExprFailedAtPacedTime});
            } else if (*actual != expected.value()) {
                report.violations.push_back(
                    {eq.target, n, ModelViolation::Reason::ExpectedValueMismatch});
            }
        }
    }
    report.is_model = report.violations.empty();
    return report;
}

}  // namespace streamcore
