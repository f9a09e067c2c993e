#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "streamcore/ast.hpp"
#include "streamcore/pacing.hpp"

namespace streamcore {

enum class TypeMode { V1, V2 };

inline const char* to_string(TypeMode m) { return m == TypeMode::V1 ? "v1" : "v2"; }

/// Finite map from output variables to their pacing annotations. Bindings are
/// insert-only and a key may be bound at most once.
class TypingContext {
public:
    bool contains(const StreamVar& var) const { return bindings_.count(var) > 0; }

    const PacingPtr* lookup(const StreamVar& var) const {
        auto it = bindings_.find(var);
        return it == bindings_.end() ? nullptr : &it->second;
    }

    /// Returns false (and leaves the context unchanged) when already bound.
    bool bind(StreamVar var, PacingPtr tau) {
        return bindings_.emplace(std::move(var), std::move(tau)).second;
    }

    size_t size() const { return bindings_.size(); }
    const std::map<StreamVar, PacingPtr>& bindings() const { return bindings_; }

private:
    std::map<StreamVar, PacingPtr> bindings_;
};

struct TypeError {
    enum class Kind {
        UnboundOutput,
        SelfAccessForbidden,
        RefinementFailure,
        DependencyCycle,
        DuplicateEquation,
    };

    Kind kind;
    std::string rule;   // name of the typing rule whose premise failed
    StreamVar output;   // equation being checked
    std::string path;   // position inside its body, e.g. "lhs.def"
    SourceSpan span;
    std::string subject;  // variable the failing premise is about

    // RefinementFailure payload: the failing relation and a valuation on
    // which tau_must fires but tau_can does not.
    PacingPtr tau_must;
    PacingPtr tau_can;
    std::map<StreamVar, bool> witness;

    // DependencyCycle payload.
    std::vector<StreamVar> cycle;
};

inline const char* to_string(TypeError::Kind k) {
    switch (k) {
        case TypeError::Kind::UnboundOutput: return "UnboundOutput";
        case TypeError::Kind::SelfAccessForbidden: return "SelfAccessForbidden";
        case TypeError::Kind::RefinementFailure: return "RefinementFailure";
        case TypeError::Kind::DependencyCycle: return "DependencyCycle";
        case TypeError::Kind::DuplicateEquation: return "DuplicateEquation";
    }
    return "?";
}

struct TypingReport {
    TypeMode mode = TypeMode::V2;
    bool reordered = false;
    std::vector<size_t> order;  // permutation of equation indices actually used
    TypingContext gamma;
    std::vector<TypeError> errors;

    bool ok() const { return errors.empty(); }
};

namespace detail {

// Shared walker for both rule systems. V1 is the self-less system; V2 takes
// the equation's own target and admits prev accesses to it (rule Self) while
// rejecting direct and hold self accesses.
struct ExprChecker {
    const TypingContext& gamma;
    TypeMode mode;
    const StreamVar* self;  // set iff mode == V2
    StreamVar owner;
    std::vector<TypeError>& errors;

    void fail(TypeError::Kind kind, const char* rule, const std::string& path,
              SourceSpan span, const StreamVar& subject) {
        TypeError e;
        e.kind = kind;
        e.rule = rule;
        e.output = owner;
        e.path = path;
        e.span = span;
        e.subject = subject.name;
        errors.push_back(std::move(e));
    }

    void fail_refinement(const char* rule, const std::string& path, SourceSpan span,
                         const StreamVar& subject, PacingPtr tau_must, PacingPtr tau_can,
                         std::map<StreamVar, bool> witness) {
        TypeError e;
        e.kind = TypeError::Kind::RefinementFailure;
        e.rule = rule;
        e.output = owner;
        e.path = path;
        e.span = span;
        e.subject = subject.name;
        e.tau_must = std::move(tau_must);
        e.tau_can = std::move(tau_can);
        e.witness = std::move(witness);
        errors.push_back(std::move(e));
    }

    bool is_self(const StreamVar& var) const { return self && var == *self; }

    // Premise shared by direct and prev accesses: the accessing pacing must
    // refine the accessed stream's pacing.
    void require_refines(const char* rule, const PacingPtr& tau_must,
                         const PacingPtr& tau_can, const std::string& path,
                         SourceSpan span, const StreamVar& subject) {
        EntailResult r = entails_with_witness(tau_must, tau_can);
        if (!r.holds)
            fail_refinement(rule, path, span, subject, tau_must, tau_can,
                            std::move(r.witness));
    }

    void check_sync_target(const StreamVar& var, const PacingPtr& tau_must,
                           bool is_prev, const std::string& path, SourceSpan span) {
        const bool v2 = mode == TypeMode::V2;
        if (var.kind == VarKind::Input) {
            const char* rule = is_prev ? (v2 ? "Sr-PrevIn" : "PrevIn")
                                       : (v2 ? "Sr-DirectIn" : "DirectIn");
            require_refines(rule, tau_must, pacing_atom(var), path, span, var);
            return;
        }
        const char* rule = is_prev ? (v2 ? "Sr-PrevOut" : "PrevOut")
                                   : (v2 ? "Sr-DirectOut" : "DirectOut");
        if (const PacingPtr* tau_can = gamma.lookup(var)) {
            require_refines(rule, tau_must, *tau_can, path, span, var);
        } else {
            fail(TypeError::Kind::UnboundOutput, rule, path, span, var);
        }
    }

    void check(const ExprPtr& e, const PacingPtr& tau_must, const std::string& path) {
        std::visit(
            overload{
                [&](const ConstExpr&) {},
                [&](const VarExpr& v) {
                    if (v.var.kind == VarKind::Output && is_self(v.var)) {
                        fail(TypeError::Kind::SelfAccessForbidden, "Sr-DirectOut", path,
                             e->span(), v.var);
                        return;
                    }
                    check_sync_target(v.var, tau_must, /*is_prev=*/false, path, e->span());
                },
                [&](const PrevExpr& p) {
                    if (p.target.kind == VarKind::Output && is_self(p.target)) {
                        // Rule Self: a stream may read its own past; only the
                        // default needs to be typeable.
                    } else {
                        check_sync_target(p.target, tau_must, /*is_prev=*/true, path,
                                          e->span());
                    }
                    check(p.def, tau_must, path + ".def");
                },
                [&](const HoldExpr& h) {
                    const bool v2 = mode == TypeMode::V2;
                    if (h.target.kind == VarKind::Output) {
                        if (is_self(h.target)) {
                            fail(TypeError::Kind::SelfAccessForbidden, "Sr-HoldOut", path,
                                 e->span(), h.target);
                        } else if (!gamma.contains(h.target)) {
                            fail(TypeError::Kind::UnboundOutput,
                                 v2 ? "Sr-HoldOut" : "HoldOut", path, e->span(), h.target);
                        }
                    }
                    // Hold accesses carry no refinement premise: the default
                    // covers absence.
                    check(h.def, tau_must, path + ".def");
                },
                [&](const BinOpExpr& b) {
                    check(b.lhs, tau_must, path + ".lhs");
                    check(b.rhs, tau_must, path + ".rhs");
                },
                [&](const NotExpr& n) { check(n.operand, tau_must, path + ".operand"); },
            },
            e->node());
    }
};

}  // namespace detail

/// Expression typing without self-references: every output access must be
/// bound in gamma, and synchronous accesses must satisfy the refinement
/// premise. Returns all premise failures; empty means derivable.
inline std::vector<TypeError> check_expr_v1(const TypingContext& gamma, const ExprPtr& e,
                                            const PacingPtr& tau_must,
                                            const StreamVar& owner = {}) {
    std::vector<TypeError> errors;
    detail::ExprChecker checker{gamma, TypeMode::V1, nullptr, owner, errors};
    checker.check(e, tau_must, "body");
    return errors;
}

/// Expression typing with self-references: as v1, except prev accesses to
/// `self` are licensed by rule Self (only the default is checked), while
/// direct and hold accesses to `self` are rejected.
inline std::vector<TypeError> check_expr_v2(const TypingContext& gamma, const StreamVar& self,
                                            const ExprPtr& e, const PacingPtr& tau_must) {
    std::vector<TypeError> errors;
    detail::ExprChecker checker{gamma, TypeMode::V2, &self, self, errors};
    checker.check(e, tau_must, "body");
    return errors;
}

// ---------------------------------------------------------------------------
// Equation ordering
// ---------------------------------------------------------------------------

struct EquationOrder {
    bool ok = false;
    std::vector<size_t> order;      // topological order of equation indices
    std::vector<StreamVar> cycle;   // one strongly connected component if !ok
};

namespace detail {

// Tarjan SCC over the access graph, looking for the first component of size
// >= 2 (self-edges are dropped, so singleton components are never cyclic).
inline std::vector<size_t> find_cycle(const std::vector<std::vector<size_t>>& succs) {
    const size_t n = succs.size();
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<size_t> stack;
    std::vector<size_t> cycle;
    int counter = 0;

    std::function<void(size_t)> strongconnect = [&](size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (size_t w : succs[v]) {
            if (index[w] < 0) {
                strongconnect(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<size_t> component;
            for (;;) {
                size_t w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                component.push_back(w);
                if (w == v) break;
            }
            if (component.size() >= 2 && cycle.empty()) {
                std::sort(component.begin(), component.end());
                cycle = component;
            }
        }
    };
    for (size_t v = 0; v < n; ++v)
        if (index[v] < 0) strongconnect(v);
    return cycle;
}

}  // namespace detail

/// Builds the dependency graph — an edge y -> x for every direct, prev, or
/// hold access in x's body (defaults included) to an output y different from
/// x — and returns a topological order, or the offending strongly connected
/// component. The order is stable: among ready equations, declaration order
/// wins.
inline EquationOrder order_equations(const Specification& spec) {
    const size_t n = spec.equations.size();
    std::map<StreamVar, size_t> index_of;
    for (size_t i = 0; i < n; ++i) index_of[spec.equations[i].target] = i;

    std::vector<std::vector<size_t>> succs(n);     // dependency -> dependents
    std::vector<std::vector<size_t>> deps(n);      // dependent -> dependencies
    for (size_t i = 0; i < n; ++i) {
        for (const auto& var : referenced_vars(spec.equations[i].body)) {
            if (var.kind != VarKind::Output || var == spec.equations[i].target) continue;
            auto it = index_of.find(var);
            if (it == index_of.end()) continue;  // undeclared: validate_spec's concern
            succs[it->second].push_back(i);
            deps[i].push_back(it->second);
        }
    }

    std::vector<size_t> remaining_deps(n);
    for (size_t i = 0; i < n; ++i) {
        std::sort(deps[i].begin(), deps[i].end());
        deps[i].erase(std::unique(deps[i].begin(), deps[i].end()), deps[i].end());
        remaining_deps[i] = deps[i].size();
    }

    EquationOrder result;
    std::set<size_t> ready;
    for (size_t i = 0; i < n; ++i)
        if (remaining_deps[i] == 0) ready.insert(i);

    std::vector<bool> done(n, false);
    while (!ready.empty()) {
        size_t i = *ready.begin();
        ready.erase(ready.begin());
        done[i] = true;
        result.order.push_back(i);
        for (size_t j : succs[i]) {
            if (done[j]) continue;
            if (--remaining_deps[j] == 0) ready.insert(j);
        }
    }

    if (result.order.size() == n) {
        result.ok = true;
        return result;
    }
    for (size_t i : detail::find_cycle(succs)) result.cycle.push_back(spec.equations[i].target);
    return result;
}

// ---------------------------------------------------------------------------
// Specification typing
// ---------------------------------------------------------------------------

/// Type-checks a specification in the requested mode, processing equations in
/// declaration order or, with `reorder`, in dependency order (the permutation
/// rule). All errors are collected: after a failing equation the context is
/// still extended with the annotated pacing so later equations are checked
/// too; the accept/reject verdict is unaffected.
inline TypingReport check_spec(const Specification& spec, TypeMode mode, bool reorder) {
    TypingReport report;
    report.mode = mode;

    report.order.resize(spec.equations.size());
    for (size_t i = 0; i < report.order.size(); ++i) report.order[i] = i;

    if (reorder) {
        EquationOrder ord = order_equations(spec);
        if (ord.ok) {
            report.reordered = ord.order != report.order;
            report.order = std::move(ord.order);
        } else {
            TypeError e;
            e.kind = TypeError::Kind::DependencyCycle;
            e.rule = "Permutation";
            e.output = ord.cycle.front();
            e.path = "body";
            e.cycle = ord.cycle;
            report.errors.push_back(std::move(e));
        }
    }

    for (size_t idx : report.order) {
        const Equation& eq = spec.equations[idx];
        if (report.gamma.contains(eq.target)) {
            TypeError e;
            e.kind = TypeError::Kind::DuplicateEquation;
            e.rule = mode == TypeMode::V2 ? "Sr-Eq" : "Equation";
            e.output = eq.target;
            e.path = "body";
            e.span = eq.span;
            e.subject = eq.target.name;
            report.errors.push_back(std::move(e));
            continue;
        }
        std::vector<TypeError> errors =
            mode == TypeMode::V1 ? check_expr_v1(report.gamma, eq.body, eq.pacing, eq.target)
                                 : check_expr_v2(report.gamma, eq.target, eq.body, eq.pacing);
        for (auto& e : errors) {
            if (!e.span.valid()) e.span = eq.span;
            report.errors.push_back(std::move(e));
        }
        report.gamma.bind(eq.target, eq.pacing);
    }
    return report;
}

}  // namespace streamcore
