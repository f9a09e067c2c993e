#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "streamcore/core.hpp"

namespace streamcore {

// ---------------------------------------------------------------------------
// Stream expressions
// ---------------------------------------------------------------------------

enum class BinaryOp { Add, Sub, Mul, Div, Eq, Lt, Gt, And, Or };

inline const char* to_string(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Gt: return ">";
        case BinaryOp::And: return "&&";
        case BinaryOp::Or: return "||";
    }
    return "?";
}

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct ConstExpr {
    Value value;
};

struct VarExpr {
    StreamVar var;
};

/// `x.prev(or: d)` — previous defined value of x, requiring x to also have a
/// current value; d supplies the value on x's first occurrence.
struct PrevExpr {
    StreamVar target;
    ExprPtr def;
};

/// `x.hold(or: d)` — most recent value of x (current instant included), or d.
struct HoldExpr {
    StreamVar target;
    ExprPtr def;
};

struct BinOpExpr {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};

struct NotExpr {
    ExprPtr operand;
};

/// Immutable expression tree node. Nodes are shared; span is for error
/// reporting only and is ignored by structural equality.
class Expr {
public:
    using Node = std::variant<ConstExpr, VarExpr, PrevExpr, HoldExpr, BinOpExpr, NotExpr>;

    Expr(Node node, SourceSpan span) : node_(std::move(node)), span_(span) {}

    const Node& node() const { return node_; }
    const SourceSpan& span() const { return span_; }

    template <typename T>
    const T* as() const {
        return std::get_if<T>(&node_);
    }

private:
    Node node_;
    SourceSpan span_;
};

inline ExprPtr make_const(Value v, SourceSpan span = {}) {
    return std::make_shared<Expr>(ConstExpr{v}, span);
}
inline ExprPtr make_var(StreamVar var, SourceSpan span = {}) {
    return std::make_shared<Expr>(VarExpr{std::move(var)}, span);
}
inline ExprPtr make_prev(StreamVar target, ExprPtr def, SourceSpan span = {}) {
    return std::make_shared<Expr>(PrevExpr{std::move(target), std::move(def)}, span);
}
inline ExprPtr make_hold(StreamVar target, ExprPtr def, SourceSpan span = {}) {
    return std::make_shared<Expr>(HoldExpr{std::move(target), std::move(def)}, span);
}
inline ExprPtr make_binop(BinaryOp op, ExprPtr lhs, ExprPtr rhs, SourceSpan span = {}) {
    return std::make_shared<Expr>(BinOpExpr{op, std::move(lhs), std::move(rhs)}, span);
}
inline ExprPtr make_not(ExprPtr operand, SourceSpan span = {}) {
    return std::make_shared<Expr>(NotExpr{std::move(operand)}, span);
}

inline bool equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return std::visit(
        overload{
            [&](const ConstExpr& x) {
                auto* y = b->as<ConstExpr>();
                return y && x.value == y->value;
            },
            [&](const VarExpr& x) {
                auto* y = b->as<VarExpr>();
                return y && x.var == y->var;
            },
            [&](const PrevExpr& x) {
                auto* y = b->as<PrevExpr>();
                return y && x.target == y->target && equal(x.def, y->def);
            },
            [&](const HoldExpr& x) {
                auto* y = b->as<HoldExpr>();
                return y && x.target == y->target && equal(x.def, y->def);
            },
            [&](const BinOpExpr& x) {
                auto* y = b->as<BinOpExpr>();
                return y && x.op == y->op && equal(x.lhs, y->lhs) && equal(x.rhs, y->rhs);
            },
            [&](const NotExpr& x) {
                auto* y = b->as<NotExpr>();
                return y && equal(x.operand, y->operand);
            },
        },
        a->node());
}

/// Walks every node of an expression tree, defaults included.
inline void for_each_node(const ExprPtr& e, const std::function<void(const Expr&)>& f) {
    if (!e) return;
    f(*e);
    std::visit(overload{
                   [](const ConstExpr&) {},
                   [](const VarExpr&) {},
                   [&](const PrevExpr& p) { for_each_node(p.def, f); },
                   [&](const HoldExpr& h) { for_each_node(h.def, f); },
                   [&](const BinOpExpr& b) {
                       for_each_node(b.lhs, f);
                       for_each_node(b.rhs, f);
                   },
                   [&](const NotExpr& n) { for_each_node(n.operand, f); },
               },
               e->node());
}

/// All stream variables referenced by an expression (accesses and defaults).
inline std::set<StreamVar> referenced_vars(const ExprPtr& e) {
    std::set<StreamVar> out;
    for_each_node(e, [&](const Expr& node) {
        std::visit(overload{
                       [&](const VarExpr& v) { out.insert(v.var); },
                       [&](const PrevExpr& p) { out.insert(p.target); },
                       [&](const HoldExpr& h) { out.insert(h.target); },
                       [](const auto&) {},
                   },
                   node.node());
    });
    return out;
}

// ---------------------------------------------------------------------------
// Pacing annotations
// ---------------------------------------------------------------------------

class PacingFormula;
using PacingPtr = std::shared_ptr<const PacingFormula>;

struct PacingAtom {
    StreamVar input;  // kind must be Input
};
struct PacingTop {};
struct PacingAnd {
    PacingPtr lhs;
    PacingPtr rhs;
};
struct PacingOr {
    PacingPtr lhs;
    PacingPtr rhs;
};

/// Positive boolean formula over input stream names. There is deliberately
/// no negation constructor.
class PacingFormula {
public:
    using Node = std::variant<PacingAtom, PacingTop, PacingAnd, PacingOr>;

    PacingFormula(Node node, SourceSpan span) : node_(std::move(node)), span_(span) {}

    const Node& node() const { return node_; }
    const SourceSpan& span() const { return span_; }

    template <typename T>
    const T* as() const {
        return std::get_if<T>(&node_);
    }

private:
    Node node_;
    SourceSpan span_;
};

inline PacingPtr pacing_atom(StreamVar input, SourceSpan span = {}) {
    return std::make_shared<PacingFormula>(PacingAtom{std::move(input)}, span);
}
inline PacingPtr pacing_top(SourceSpan span = {}) {
    return std::make_shared<PacingFormula>(PacingTop{}, span);
}
inline PacingPtr pacing_and(PacingPtr l, PacingPtr r, SourceSpan span = {}) {
    return std::make_shared<PacingFormula>(PacingAnd{std::move(l), std::move(r)}, span);
}
inline PacingPtr pacing_or(PacingPtr l, PacingPtr r, SourceSpan span = {}) {
    return std::make_shared<PacingFormula>(PacingOr{std::move(l), std::move(r)}, span);
}

inline bool equal(const PacingPtr& a, const PacingPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return std::visit(overload{
                          [&](const PacingAtom& x) {
                              auto* y = b->as<PacingAtom>();
                              return y && x.input == y->input;
                          },
                          [&](const PacingTop&) { return b->as<PacingTop>() != nullptr; },
                          [&](const PacingAnd& x) {
                              auto* y = b->as<PacingAnd>();
                              return y && equal(x.lhs, y->lhs) && equal(x.rhs, y->rhs);
                          },
                          [&](const PacingOr& x) {
                              auto* y = b->as<PacingOr>();
                              return y && equal(x.lhs, y->lhs) && equal(x.rhs, y->rhs);
                          },
                      },
                      a->node());
}

inline void collect_atoms(const PacingPtr& tau, std::set<StreamVar>& out) {
    if (!tau) return;
    std::visit(overload{
                   [&](const PacingAtom& a) { out.insert(a.input); },
                   [](const PacingTop&) {},
                   [&](const PacingAnd& an) {
                       collect_atoms(an.lhs, out);
                       collect_atoms(an.rhs, out);
                   },
                   [&](const PacingOr& o) {
                       collect_atoms(o.lhs, out);
                       collect_atoms(o.rhs, out);
                   },
               },
               tau->node());
}

inline std::set<StreamVar> atoms(const PacingPtr& tau) {
    std::set<StreamVar> out;
    collect_atoms(tau, out);
    return out;
}

// ---------------------------------------------------------------------------
// Equations and specifications
// ---------------------------------------------------------------------------

/// `target @ pacing := body` with target an output stream.
struct Equation {
    StreamVar target;
    PacingPtr pacing;
    ExprPtr body;
    SourceSpan span = {};
};

inline bool equal(const Equation& a, const Equation& b) {
    return a.target == b.target && equal(a.pacing, b.pacing) && equal(a.body, b.body);
}

/// An ordered list of input declarations followed by stream equations.
struct Specification {
    std::vector<StreamVar> inputs;
    std::vector<Equation> equations;

    bool has_input(const std::string& name) const {
        return std::any_of(inputs.begin(), inputs.end(),
                           [&](const StreamVar& v) { return v.name == name; });
    }

    const Equation* find_equation(const std::string& name) const {
        for (const auto& eq : equations)
            if (eq.target.name == name) return &eq;
        return nullptr;
    }

    std::vector<StreamVar> output_vars() const {
        std::vector<StreamVar> out;
        out.reserve(equations.size());
        for (const auto& eq : equations) out.push_back(eq.target);
        return out;
    }

    std::vector<StreamVar> all_vars() const {
        std::vector<StreamVar> out = inputs;
        for (const auto& eq : equations) out.push_back(eq.target);
        return out;
    }
};

inline bool equal(const Specification& a, const Specification& b) {
    if (a.inputs != b.inputs) return false;
    if (a.equations.size() != b.equations.size()) return false;
    for (size_t i = 0; i < a.equations.size(); ++i)
        if (!equal(a.equations[i], b.equations[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Well-formedness
// ---------------------------------------------------------------------------

struct WellFormednessError {
    enum class Kind {
        InvalidIdentifier,
        InputOutputNameCollision,
        DuplicateTarget,
        UndeclaredVariable,
        PacingAtomNotInput,
    };

    Kind kind;
    std::string name;
    SourceSpan span = {};
    std::string message;

    friend bool operator==(const WellFormednessError& a, const WellFormednessError& b) {
        return a.kind == b.kind && a.name == b.name;
    }
};

/// Checks the syntactic side conditions of a specification. Returns all
/// violations in a deterministic order; an empty list means valid.
inline std::vector<WellFormednessError> validate_spec(const Specification& spec) {
    using Kind = WellFormednessError::Kind;
    std::vector<WellFormednessError> errors;
    auto report = [&](Kind kind, const std::string& name, SourceSpan span,
                      std::string message) {
        errors.push_back({kind, name, span, std::move(message)});
    };

    std::set<std::string> input_names;
    for (const auto& in : spec.inputs) {
        if (!is_identifier(in.name))
            report(Kind::InvalidIdentifier, in.name, {},
                   "invalid input name '" + in.name + "'");
        if (!input_names.insert(in.name).second)
            report(Kind::DuplicateTarget, in.name, {},
                   "input '" + in.name + "' declared twice");
    }

    std::set<std::string> target_names;
    for (const auto& eq : spec.equations) {
        if (!is_identifier(eq.target.name))
            report(Kind::InvalidIdentifier, eq.target.name, eq.span,
                   "invalid output name '" + eq.target.name + "'");
        if (input_names.count(eq.target.name))
            report(Kind::InputOutputNameCollision, eq.target.name, eq.span,
                   "'" + eq.target.name + "' is declared both as input and output");
        if (!target_names.insert(eq.target.name).second)
            report(Kind::DuplicateTarget, eq.target.name, eq.span,
                   "output '" + eq.target.name + "' has more than one equation");
    }

    auto declared = [&](const StreamVar& v) {
        if (v.kind == VarKind::Input) return input_names.count(v.name) > 0;
        return target_names.count(v.name) > 0;
    };

    for (const auto& eq : spec.equations) {
        for (const auto& atom : atoms(eq.pacing)) {
            if (atom.kind != VarKind::Input || target_names.count(atom.name))
                report(Kind::PacingAtomNotInput, atom.name, eq.span,
                       "pacing atom '" + atom.name + "' does not name an input");
            else if (!input_names.count(atom.name))
                report(Kind::UndeclaredVariable, atom.name, eq.span,
                       "pacing atom '" + atom.name + "' is not declared");
        }
        for (const auto& var : referenced_vars(eq.body)) {
            if (!declared(var))
                report(Kind::UndeclaredVariable, var.name, eq.span,
                       "'" + var.name + "' is referenced but never declared");
        }
    }
    return errors;
}

}  // namespace streamcore
