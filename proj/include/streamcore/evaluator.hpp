#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "streamcore/ast.hpp"
#include "streamcore/pacing.hpp"
#include "streamcore/semantics.hpp"
#include "streamcore/trace.hpp"
#include "streamcore/typecheck.hpp"

namespace streamcore {

/// Execution plan for a specification: equations in dependency order, with
/// their pacing and whether they read their own past. Built only from a
/// passing typing report; the evaluator's no-failure guarantee holds for
/// well-typed specifications only.
struct EvalPlan {
    Specification spec;
    TypeMode mode = TypeMode::V2;
    std::vector<size_t> order;      // equation indices in evaluation order
    std::vector<bool> self_ref;     // per equation (original index)
};

/// Everything the online evaluator carries between steps: the next time
/// index and one memory cell (last defined value) per stream. Size is
/// O(#streams), independent of how long the monitor has been running.
struct MonitorState {
    size_t time = 0;
    std::map<StreamVar, MemoryCell> cells;        // output streams
    std::map<StreamVar, MemoryCell> input_cells;  // input streams
};

struct RuntimeDiagnostic {
    StreamVar output;
    size_t time = 0;
    std::string message;
};

/// Outputs produced at one time point. A stream is present exactly when its
/// pacing fires on this step's input presence (absent-with-diagnostic when
/// its expression raised an arithmetic error).
struct StepResult {
    std::map<StreamVar, OptValue> outputs;
    std::vector<RuntimeDiagnostic> diagnostics;
};

/// Raised when evaluation of a well-typed specification hits the failure
/// marker. This falsifies the type system's guarantee, so it is loud.
class InternalFailure : public std::logic_error {
public:
    InternalFailure(StreamVar stream, size_t time, const std::string& access)
        : std::logic_error("internal failure: stream '" + stream.name + "' at time " +
                           std::to_string(time) + ": " + access),
          stream_(std::move(stream)),
          time_(time),
          access_(access) {}

    const StreamVar& stream() const { return stream_; }
    size_t time() const { return time_; }
    const std::string& access() const { return access_; }

private:
    StreamVar stream_;
    size_t time_;
    std::string access_;
};

/// A failure observed while running without the type check (see
/// run_unchecked).
struct FailEvent {
    StreamVar output;
    size_t time = 0;
    std::string access;
};

inline bool self_references(const Equation& eq) {
    bool found = false;
    for_each_node(eq.body, [&](const Expr& node) {
        if (auto* p = node.as<PrevExpr>())
            if (p->target == eq.target) found = true;
    });
    return found;
}

/// Builds the evaluation plan for a well-typed specification. Refuses
/// reports that carry errors.
inline EvalPlan plan(const Specification& spec, const TypingReport& report) {
    if (!report.ok())
        throw std::invalid_argument("plan: specification is not well-typed");
    if (report.order.size() != spec.equations.size())
        throw std::invalid_argument("plan: typing report does not match specification");
    EvalPlan p;
    p.spec = spec;
    p.mode = report.mode;
    p.order = report.order;
    p.self_ref.reserve(spec.equations.size());
    for (const auto& eq : spec.equations) p.self_ref.push_back(self_references(eq));
    return p;
}

inline MonitorState initial_state(const EvalPlan& plan) {
    MonitorState state;
    for (const auto& in : plan.spec.inputs) state.input_cells[in] = MemoryCell::no_value();
    for (const auto& eq : plan.spec.equations) state.cells[eq.target] = MemoryCell::no_value();
    return state;
}

namespace detail {

// Per-step expression evaluation. Accesses resolve against this step's input
// row, the memory cells (which still hold values from strictly earlier
// steps), and the outputs already computed this step. `fails`, when set,
// collects failures instead of throwing; that is the unchecked mode used to
// demonstrate that ill-typed specifications actually break.
struct StepContext {
    const MonitorState& state;
    const std::map<StreamVar, OptValue>& row;
    std::map<StreamVar, OptValue>& out_now;
    const StreamVar& self;
    std::vector<FailEvent>* fails;

    EvalOutcome failure(const std::string& access) {
        if (!fails) throw InternalFailure(self, state.time, access);
        fails->push_back({self, state.time, access});
        return EvalOutcome::fail();
    }

    EvalOutcome eval(const ExprPtr& e) {
        return std::visit(
            overload{
                [&](const ConstExpr& c) { return EvalOutcome::ok(c.value); },
                [&](const VarExpr& v) { return eval_sync(v.var); },
                [&](const PrevExpr& p) { return eval_prev(p); },
                [&](const HoldExpr& h) { return eval_hold(h); },
                [&](const BinOpExpr& b) {
                    EvalOutcome lhs = eval(b.lhs);
                    EvalOutcome rhs = eval(b.rhs);
                    if (lhs.is_fail() || rhs.is_fail()) return EvalOutcome::fail();
                    return EvalOutcome::ok(apply_binop(b.op, lhs.value(), rhs.value()));
                },
                [&](const NotExpr& n) {
                    EvalOutcome v = eval(n.operand);
                    if (v.is_fail()) return EvalOutcome::fail();
                    return EvalOutcome::ok(v.value() == 0 ? 1 : 0);
                },
            },
            e->node());
    }

    EvalOutcome eval_sync(const StreamVar& var) {
        if (var.kind == VarKind::Input) {
            OptValue now = current_input(var);
            if (now.has_value()) return EvalOutcome::ok(*now);
            return failure("sync access to input '" + var.name + "' which has no value");
        }
        if (var == self)
            return failure("direct access to own stream '" + var.name + "'");
        auto it = out_now.find(var);
        if (it == out_now.end())
            return failure("access to stream '" + var.name + "' which is not yet computed");
        if (it->second.has_value()) return EvalOutcome::ok(*it->second);
        return failure("sync access to stream '" + var.name + "' which has no value");
    }

    EvalOutcome eval_prev(const PrevExpr& p) {
        if (p.target.kind == VarKind::Output && p.target == self) {
            // Own past: read the memory cell; the default covers the first
            // step and the time before any own value exists.
            const MemoryCell& cell = state.cells.at(p.target);
            if (state.time > 0 && cell.has_value()) return EvalOutcome::ok(cell.value());
            return eval(p.def);
        }
        OptValue now;
        const MemoryCell* cell = nullptr;
        if (p.target.kind == VarKind::Input) {
            now = current_input(p.target);
            cell = &state.input_cells.at(p.target);
        } else {
            auto it = out_now.find(p.target);
            if (it == out_now.end())
                return failure("access to stream '" + p.target.name +
                               "' which is not yet computed");
            now = it->second;
            cell = &state.cells.at(p.target);
        }
        if (!now.has_value())
            return failure("prev access to stream '" + p.target.name +
                           "' which has no current value");
        if (state.time > 0 && cell->has_value()) return EvalOutcome::ok(cell->value());
        return eval(p.def);
    }

    EvalOutcome eval_hold(const HoldExpr& h) {
        if (h.target.kind == VarKind::Output && h.target == self)
            return failure("hold access to own stream '" + h.target.name + "'");
        OptValue now;
        const MemoryCell* cell = nullptr;
        if (h.target.kind == VarKind::Input) {
            now = current_input(h.target);
            cell = &state.input_cells.at(h.target);
        } else {
            auto it = out_now.find(h.target);
            if (it == out_now.end())
                return failure("access to stream '" + h.target.name +
                               "' which is not yet computed");
            now = it->second;
            cell = &state.cells.at(h.target);
        }
        // Hold includes the current instant, then falls back to the last
        // defined value and finally the default.
        if (now.has_value()) return EvalOutcome::ok(*now);
        if (cell->has_value()) return EvalOutcome::ok(cell->value());
        return eval(h.def);
    }

    OptValue current_input(const StreamVar& var) const {
        auto it = row.find(var);
        if (it == row.end())
            throw std::invalid_argument("step: input row has no entry for '" + var.name + "'");
        return it->second;
    }
};

inline std::pair<MonitorState, StepResult> step_impl(const MonitorState& state,
                                                     const EvalPlan& plan,
                                                     const std::map<StreamVar, OptValue>& row,
                                                     std::vector<FailEvent>* fails) {
    PresenceRow presence;
    for (const auto& in : plan.spec.inputs) {
        auto it = row.find(in);
        if (it == row.end())
            throw std::invalid_argument("step: input row has no entry for '" + in.name + "'");
        presence[in] = it->second.has_value();
    }

    StepResult result;
    for (size_t idx : plan.order) {
        const Equation& eq = plan.spec.equations[idx];
        if (!fires(eq.pacing, presence)) {
            result.outputs[eq.target] = std::nullopt;
            continue;
        }
        StepContext ctx{state, row, result.outputs, eq.target, fails};
        try {
            EvalOutcome out = ctx.eval(eq.body);
            result.outputs[eq.target] = out.is_ok() ? OptValue(out.value()) : std::nullopt;
        } catch (const ArithmeticError& e) {
            result.outputs[eq.target] = std::nullopt;
            result.diagnostics.push_back({eq.target, state.time, e.what()});
        }
    }

    // Memory cells are updated only after the whole step, so that prev
    // accesses observed the state before this time point.
    MonitorState next = state;
    for (const auto& in : plan.spec.inputs) {
        OptValue v = row.at(in);
        if (v.has_value()) next.input_cells[in] = MemoryCell::val(*v);
    }
    for (const auto& [var, v] : result.outputs)
        if (v.has_value()) next.cells[var] = MemoryCell::val(*v);
    next.time = state.time + 1;
    return {std::move(next), std::move(result)};
}

}  // namespace detail

/// Advances the monitor by one time point. For each equation in plan order
/// whose pacing fires on this row's presence, evaluates its body against the
/// current inputs, the already-computed outputs of this step, and the memory
/// cells. A failure here is impossible for well-typed specifications and
/// throws InternalFailure.
inline std::pair<MonitorState, StepResult> step(const MonitorState& state, const EvalPlan& plan,
                                                const std::map<StreamVar, OptValue>& row) {
    return detail::step_impl(state, plan, row, nullptr);
}

/// Result of running a specification over a finite input trace.
struct RunResult {
    TypingReport report;
    std::optional<StreamTrace> trace;  // inputs joined with all outputs
    std::vector<RuntimeDiagnostic> diagnostics;

    bool ok() const { return trace.has_value(); }
};

namespace detail {

inline StreamTrace run_plan(const EvalPlan& plan, const StreamTrace& inputs,
                            std::vector<RuntimeDiagnostic>& diagnostics,
                            std::vector<FailEvent>* fails) {
    const size_t horizon = inputs.horizon();
    StreamTrace out(horizon);
    for (const auto& in : plan.spec.inputs) out.set_column(in, inputs.column(in));

    std::map<StreamVar, StreamTrace::Column> columns;
    for (const auto& eq : plan.spec.equations)
        columns[eq.target] = StreamTrace::Column(horizon, std::nullopt);

    MonitorState state = initial_state(plan);
    for (size_t n = 0; n < horizon; ++n) {
        std::map<StreamVar, OptValue> row;
        for (const auto& in : plan.spec.inputs) row[in] = inputs.at(in, n);
        auto [next, result] = step_impl(state, plan, row, fails);
        for (const auto& [var, v] : result.outputs) columns[var][n] = v;
        for (auto& d : result.diagnostics) diagnostics.push_back(std::move(d));
        state = std::move(next);
    }
    for (auto& [var, col] : columns) out.set_column(var, std::move(col));
    return out;
}

}  // namespace detail

/// Type-checks, plans, and folds `step` over the whole input trace. The
/// result is the minimal model: each output is present exactly at its
/// pacing's time points. Ill-typed specifications are not run; the failing
/// report is returned instead.
inline RunResult run(const Specification& spec, const StreamTrace& inputs,
                     TypeMode mode = TypeMode::V2, bool reorder = true) {
    if (!validate_spec(spec).empty())
        throw std::invalid_argument("run: specification is not well-formed");
    RunResult result;
    result.report = check_spec(spec, mode, reorder);
    if (!result.report.ok()) return result;
    EvalPlan p = plan(spec, result.report);
    result.trace = detail::run_plan(p, inputs, result.diagnostics, nullptr);
    return result;
}

/// Result of running with the type check bypassed: failures are recorded
/// (the stream stays absent) rather than being impossible.
struct UncheckedRun {
    StreamTrace trace;
    std::vector<FailEvent> fails;
    std::vector<RuntimeDiagnostic> diagnostics;
};

/// Runs a specification without type-checking it, in dependency order when
/// one exists and declaration order otherwise. Used to demonstrate that
/// rejected specifications genuinely fail on some traces.
inline UncheckedRun run_unchecked(const Specification& spec, const StreamTrace& inputs) {
    EvalPlan p;
    p.spec = spec;
    EquationOrder ord = order_equations(spec);
    if (ord.ok) {
        p.order = std::move(ord.order);
    } else {
        p.order.resize(spec.equations.size());
        for (size_t i = 0; i < p.order.size(); ++i) p.order[i] = i;
    }
    for (const auto& eq : spec.equations) p.self_ref.push_back(self_references(eq));

    UncheckedRun result{StreamTrace(inputs.horizon()), {}, {}};
    result.trace = detail::run_plan(p, inputs, result.diagnostics, &result.fails);
    return result;
}

}  // namespace streamcore
