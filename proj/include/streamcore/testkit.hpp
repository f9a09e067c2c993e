#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "streamcore/ast.hpp"
#include "streamcore/evaluator.hpp"
#include "streamcore/pacing.hpp"
#include "streamcore/semantics.hpp"
#include "streamcore/trace.hpp"
#include "streamcore/typecheck.hpp"

namespace streamcore::testkit {

// ---------------------------------------------------------------------------
// Deterministic random source
// ---------------------------------------------------------------------------

/// splitmix64; a fixed algorithm so corpora reproduce across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    size_t below(size_t n) { return n == 0 ? 0 : next() % n; }

    bool chance(double p) {
        return static_cast<double>(next() >> 11) / 9007199254740992.0 < p;
    }

    Value value_in(Value lo, Value hi) {
        return lo + static_cast<Value>(below(static_cast<size_t>(hi - lo + 1)));
    }

    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[below(items.size())];
    }

private:
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Knobs for spec and trace generation. The same config always reproduces
/// the same specification and the same trace.
struct GenConfig {
    std::uint64_t seed = 1;
    size_t num_inputs = 2;      // clamped to 1..4
    size_t num_equations = 4;   // <= 8
    size_t max_expr_depth = 3;  // <= 4
    size_t horizon = 20;        // <= 50
    double presence_density = 0.5;
    TypeMode mode = TypeMode::V2;
};

// ---------------------------------------------------------------------------
// Well-typed specification generator
// ---------------------------------------------------------------------------

namespace detail {

constexpr double kInputMagnitude = 100;      // |input values| stay below this
constexpr double kSelfSteps = 51;            // horizon <= 50 self applications
constexpr double kBetaCap = 274877906944.0;  // 2^38

// Magnitude envelope of a generated expression: |value| <= has_self*S + beta
// where S bounds the equation's own memory cell. has_self stays a 0/1
// coefficient and arithmetic keeps beta under kBetaCap, which is what makes
// every generated run free of overflow and division by zero.
struct GenExpr {
    ExprPtr expr;
    bool has_self = false;
    double beta = 0;
};

struct BoundOutput {
    StreamVar var;
    PacingPtr pacing;
    double bound = 0;
};

class SpecGen {
public:
    SpecGen(Rng& rng, const GenConfig& cfg) : rng_(rng), cfg_(cfg) {
        static const char* names[] = {"a", "b", "c", "d"};
        size_t count = std::clamp<size_t>(cfg.num_inputs, 1, 4);
        for (size_t i = 0; i < count; ++i) inputs_.push_back(input_var(names[i]));
    }

    Specification generate() {
        Specification spec;
        spec.inputs = inputs_;
        for (size_t j = 0; j < cfg_.num_equations; ++j) {
            self_ = output_var("s" + std::to_string(j));
            tau_ = gen_pacing();
            sync_inputs_.clear();
            sync_outputs_.clear();
            for (size_t i = 0; i < inputs_.size(); ++i)
                if (entails(tau_, pacing_atom(inputs_[i]))) sync_inputs_.push_back(i);
            for (size_t i = 0; i < outputs_.size(); ++i)
                if (entails(tau_, outputs_[i].pacing)) sync_outputs_.push_back(i);

            size_t depth = 1 + rng_.below(std::max<size_t>(cfg_.max_expr_depth, 1));
            GenExpr body = gen_expr(depth, /*self_ok=*/cfg_.mode == TypeMode::V2);
            spec.equations.push_back({self_, tau_, body.expr});
            double bound = body.has_self ? kSelfSteps * body.beta : body.beta;
            outputs_.push_back({self_, tau_, bound});
        }
        return spec;
    }

private:
    Rng& rng_;
    const GenConfig& cfg_;
    std::vector<StreamVar> inputs_;
    std::vector<BoundOutput> outputs_;
    StreamVar self_;
    PacingPtr tau_;
    std::vector<size_t> sync_inputs_;
    std::vector<size_t> sync_outputs_;

    PacingPtr gen_atom() { return pacing_atom(rng_.pick(inputs_)); }

    PacingPtr gen_pacing_tree(size_t connectives) {
        if (connectives == 0) return rng_.chance(0.15) ? pacing_top() : gen_atom();
        size_t left = rng_.below(connectives);
        PacingPtr l = gen_pacing_tree(left);
        PacingPtr r = gen_pacing_tree(connectives - 1 - left);
        return rng_.chance(0.5) ? pacing_and(l, r) : pacing_or(l, r);
    }

    PacingPtr gen_pacing() {
        size_t r = rng_.below(100);
        if (r < 45) return gen_atom();
        if (r < 65) return pacing_and(gen_atom(), gen_atom());
        if (r < 80) return pacing_or(gen_atom(), gen_atom());
        if (r < 88) return pacing_top();
        return gen_pacing_tree(2 + rng_.below(2));
    }

    GenExpr gen_const() {
        Value v = rng_.value_in(-9, 9);
        return {make_const(v), false, static_cast<double>(std::abs(v))};
    }

    GenExpr gen_default(size_t depth) {
        // Defaults are typed at the same pacing; the generator keeps them
        // self-free so the magnitude envelope stays additive.
        return gen_expr(depth > 0 ? depth - 1 : 0, /*self_ok=*/false);
    }

    GenExpr gen_access(size_t depth, bool self_ok) {
        if (self_ok && cfg_.mode == TypeMode::V2 && rng_.chance(0.3)) {
            GenExpr d = gen_default(depth);
            return {make_prev(self_, d.expr), true, d.beta};
        }
        enum Choice { SyncIn, SyncOut, PrevIn, PrevOut, HoldIn, HoldOut };
        std::vector<Choice> choices{HoldIn};
        if (!sync_inputs_.empty()) choices.insert(choices.end(), {SyncIn, SyncIn, PrevIn});
        if (!sync_outputs_.empty()) choices.insert(choices.end(), {SyncOut, SyncOut, PrevOut});
        if (!outputs_.empty()) choices.push_back(HoldOut);

        switch (rng_.pick(choices)) {
            case SyncIn:
                return {make_var(inputs_[rng_.pick(sync_inputs_)]), false, kInputMagnitude};
            case SyncOut: {
                const BoundOutput& o = outputs_[rng_.pick(sync_outputs_)];
                return {make_var(o.var), false, o.bound};
            }
            case PrevIn: {
                const StreamVar& v = inputs_[rng_.pick(sync_inputs_)];
                GenExpr d = gen_default(depth);
                return {make_prev(v, d.expr), false, std::max(kInputMagnitude, d.beta)};
            }
            case PrevOut: {
                const BoundOutput& o = outputs_[rng_.pick(sync_outputs_)];
                GenExpr d = gen_default(depth);
                return {make_prev(o.var, d.expr), false, std::max(o.bound, d.beta)};
            }
            case HoldIn: {
                const StreamVar& v = rng_.pick(inputs_);
                GenExpr d = gen_default(depth);
                return {make_hold(v, d.expr), false, std::max(kInputMagnitude, d.beta)};
            }
            case HoldOut: {
                const BoundOutput& o = outputs_[rng_.below(outputs_.size())];
                GenExpr d = gen_default(depth);
                return {make_hold(o.var, d.expr), false, std::max(o.bound, d.beta)};
            }
        }
        return gen_const();
    }

    GenExpr gen_binop(size_t depth, bool self_ok) {
        size_t r = rng_.below(100);
        if (r < 40) {  // additive
            BinaryOp op = rng_.chance(0.5) ? BinaryOp::Add : BinaryOp::Sub;
            GenExpr l = gen_expr(depth - 1, self_ok);
            GenExpr rhs = gen_expr(depth - 1, self_ok && !l.has_self);
            if (l.beta > kBetaCap / 2) l = gen_const();
            if (rhs.beta > kBetaCap / 2 || (l.has_self && rhs.has_self)) rhs = gen_const();
            return {make_binop(op, l.expr, rhs.expr), l.has_self || rhs.has_self,
                    l.beta + rhs.beta};
        }
        if (r < 50) {  // multiply by a small constant
            GenExpr l = gen_expr(depth - 1, /*self_ok=*/false);
            if (l.beta > kBetaCap / 4) l = gen_const();
            Value c = rng_.value_in(1, 3) * (rng_.chance(0.3) ? -1 : 1);
            GenExpr rhs{make_const(c), false, static_cast<double>(std::abs(c))};
            bool flip = rng_.chance(0.3);
            ExprPtr e = flip ? make_binop(BinaryOp::Mul, rhs.expr, l.expr)
                             : make_binop(BinaryOp::Mul, l.expr, rhs.expr);
            return {e, false, l.beta * std::abs(static_cast<double>(c))};
        }
        if (r < 60) {  // divide by a nonzero constant
            GenExpr l = gen_expr(depth - 1, self_ok);
            Value c = rng_.value_in(1, 9);
            return {make_binop(BinaryOp::Div, l.expr, make_const(c)), l.has_self, l.beta};
        }
        BinaryOp op;
        if (r < 72) op = BinaryOp::Lt;
        else if (r < 80) op = BinaryOp::Gt;
        else if (r < 86) op = BinaryOp::Eq;
        else if (r < 93) op = BinaryOp::And;
        else op = BinaryOp::Or;
        GenExpr l = gen_expr(depth - 1, self_ok);
        GenExpr rhs = gen_expr(depth - 1, self_ok);
        // Comparisons and logic yield 0/1, resetting the magnitude envelope.
        return {make_binop(op, l.expr, rhs.expr), false, 1};
    }

    GenExpr gen_expr(size_t depth, bool self_ok) {
        if (depth == 0) {
            if (rng_.chance(0.4)) return gen_const();
            return gen_access(0, self_ok);
        }
        size_t r = rng_.below(100);
        if (r < 15) return gen_const();
        if (r < 55) return gen_access(depth, self_ok);
        if (r < 92) return gen_binop(depth, self_ok);
        GenExpr operand = gen_expr(depth - 1, self_ok);
        return {make_not(operand.expr), false, 1};
    }
};

}  // namespace detail

namespace detail {

inline PacingPtr gen_pacing_with(Rng& rng, const std::vector<StreamVar>& vars,
                                 size_t connectives) {
    if (connectives == 0) {
        if (vars.empty() || rng.chance(0.15)) return pacing_top();
        return pacing_atom(rng.pick(vars));
    }
    size_t left = rng.below(connectives);
    PacingPtr l = gen_pacing_with(rng, vars, left);
    PacingPtr r = gen_pacing_with(rng, vars, connectives - 1 - left);
    return rng.chance(0.5) ? pacing_and(l, r) : pacing_or(l, r);
}

}  // namespace detail

/// A random positive formula over the given inputs with at most
/// `max_connectives` connectives.
inline PacingPtr gen_raw_pacing(Rng& rng, const std::vector<StreamVar>& vars,
                                size_t max_connectives) {
    return detail::gen_pacing_with(rng, vars, rng.below(max_connectives + 1));
}

/// Generates a specification that passes check_spec(mode, reorder = false):
/// each equation only accesses inputs and already-bound outputs whose pacing
/// its own pacing refines, plus its own past when the mode allows it. Values
/// are kept small enough that runs never hit arithmetic errors.
inline Specification gen_well_typed_spec(const GenConfig& cfg) {
    Rng rng(cfg.seed);
    return detail::SpecGen(rng, cfg).generate();
}

/// A random input trace: each cell is present with probability
/// `presence_density`, values uniform in [-100, 100].
inline StreamTrace gen_trace(const GenConfig& cfg, const std::vector<StreamVar>& inputs) {
    Rng rng(cfg.seed ^ 0x7261636573ULL);
    StreamTrace trace(cfg.horizon);
    for (const auto& in : inputs) {
        StreamTrace::Column col(cfg.horizon);
        for (size_t n = 0; n < cfg.horizon; ++n)
            if (rng.chance(cfg.presence_density)) col[n] = rng.value_in(-100, 100);
        trace.set_column(in, col);
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Whole-stream oracle
// ---------------------------------------------------------------------------

/// Raised when the whole-stream construction hits the failure marker, which
/// for a well-typed specification means an evaluator or type checker bug.
class OracleFailure : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Literal transcription of the recursive stream construction used to prove
/// equations sound: per equation in typing order, the full output column is
/// built point by point under the memory-cell semantics, where the cell
/// carries the last defined value of the column prefix built so far. This is
/// an independent code path from the online evaluator; the two must agree
/// cell by cell.
inline StreamTrace whole_stream_construct(const Specification& spec, const StreamTrace& inputs,
                                          const TypingReport& report) {
    if (!report.ok()) throw std::invalid_argument("whole_stream_construct: ill-typed spec");
    const size_t horizon = inputs.horizon();

    StreamTrace input_part(horizon);
    for (const auto& in : spec.inputs) input_part.set_column(in, inputs.column(in));

    StreamTrace built = input_part;
    for (size_t idx : report.order) {
        const Equation& eq = spec.equations[idx];
        std::set<size_t> paced = denotation_times(eq.pacing, input_part);
        StreamTrace::Column col(horizon, std::nullopt);
        MemoryCell cell = MemoryCell::no_value();
        for (size_t n = 0; n < horizon; ++n) {
            if (paced.count(n)) {
                EvalOutcome out = eval_memcell(eq.body, built, n, eq.target, cell);
                if (out.is_fail())
                    throw OracleFailure("whole-stream construction failed for '" +
                                        eq.target.name + "' at time " + std::to_string(n));
                col[n] = out.value();
            }
            if (col[n].has_value()) cell = MemoryCell::val(*col[n]);
        }
        built.set_column(eq.target, std::move(col));
    }
    return built;
}

// ---------------------------------------------------------------------------
// Brute-force entailment oracle
// ---------------------------------------------------------------------------

namespace detail {

inline bool eval_valuation(const PacingPtr& tau, const std::map<StreamVar, bool>& val) {
    return std::visit(overload{
                          [&](const PacingAtom& a) { return val.at(a.input); },
                          [](const PacingTop&) { return true; },
                          [&](const PacingAnd& an) {
                              return eval_valuation(an.lhs, val) && eval_valuation(an.rhs, val);
                          },
                          [&](const PacingOr& o) {
                              return eval_valuation(o.lhs, val) || eval_valuation(o.rhs, val);
                          },
                      },
                      tau->node());
}

}  // namespace detail

/// Reference oracle for the refinement relation: enumerates every valuation
/// of the union of atoms and checks the implication directly.
inline bool entails_bruteforce(const PacingPtr& t1, const PacingPtr& t2) {
    std::set<StreamVar> atom_set = atoms(t1);
    collect_atoms(t2, atom_set);
    std::vector<StreamVar> vars(atom_set.begin(), atom_set.end());
    if (vars.size() > 20) throw std::length_error("too many atoms for brute force");
    for (std::uint32_t mask = 0; mask < (1u << vars.size()); ++mask) {
        std::map<StreamVar, bool> val;
        for (size_t i = 0; i < vars.size(); ++i) val[vars[i]] = (mask >> i & 1u) != 0;
        if (detail::eval_valuation(t1, val) && !detail::eval_valuation(t2, val)) return false;
    }
    return true;
}

/// Truth table of a formula over an explicit atom ordering (bit n of the
/// result = value under valuation mask n). Same evaluation route as
/// entails_bruteforce, factored for exhaustive sweeps.
inline std::uint32_t truth_table(const PacingPtr& tau, const std::vector<StreamVar>& vars) {
    if (vars.size() > 5) throw std::length_error("truth_table supports at most 5 atoms");
    std::uint32_t table = 0;
    for (std::uint32_t mask = 0; mask < (1u << vars.size()); ++mask) {
        std::map<StreamVar, bool> val;
        for (size_t i = 0; i < vars.size(); ++i) val[vars[i]] = (mask >> i & 1u) != 0;
        if (detail::eval_valuation(tau, val)) table |= 1u << mask;
    }
    return table;
}

/// Every positive formula with at most `max_connectives` connectives whose
/// leaves are drawn from `atom_vars` and Top.
inline std::vector<PacingPtr> enumerate_formulas(size_t max_connectives,
                                                 const std::vector<StreamVar>& atom_vars) {
    std::vector<std::vector<PacingPtr>> by_count(max_connectives + 1);
    for (const auto& v : atom_vars) by_count[0].push_back(pacing_atom(v));
    by_count[0].push_back(pacing_top());
    for (size_t k = 1; k <= max_connectives; ++k) {
        for (size_t i = 0; i < k; ++i) {
            size_t j = k - 1 - i;
            for (const auto& l : by_count[i]) {
                for (const auto& r : by_count[j]) {
                    by_count[k].push_back(pacing_and(l, r));
                    by_count[k].push_back(pacing_or(l, r));
                }
            }
        }
    }
    std::vector<PacingPtr> all;
    for (auto& bucket : by_count)
        for (auto& f : bucket) all.push_back(std::move(f));
    return all;
}

// ---------------------------------------------------------------------------
// Exhaustive-permutation typing oracle
// ---------------------------------------------------------------------------

/// Reference oracle for reorder-based type checking: tries every permutation
/// of the equations and accepts iff some order type-checks without
/// reordering. Refuses more than 6 equations.
inline bool check_spec_all_permutations(const Specification& spec, TypeMode mode) {
    if (spec.equations.size() > 6)
        throw std::invalid_argument("check_spec_all_permutations: more than 6 equations");
    std::vector<size_t> perm(spec.equations.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
        Specification permuted;
        permuted.inputs = spec.inputs;
        for (size_t idx : perm) permuted.equations.push_back(spec.equations[idx]);
        if (check_spec(permuted, mode, /*reorder=*/false).ok()) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

// ---------------------------------------------------------------------------
// Raw expressions (for semantics agreement sampling)
// ---------------------------------------------------------------------------

/// An arbitrary expression over the given variables, with no typing
/// discipline at all. Division only ever uses nonzero constant divisors and
/// depth stays small, so evaluation cannot hit arithmetic errors.
inline ExprPtr gen_raw_expr(Rng& rng, const std::vector<StreamVar>& universe, size_t depth) {
    if (depth == 0 || rng.chance(0.2)) {
        if (universe.empty() || rng.chance(0.4)) return make_const(rng.value_in(-100, 100));
        return make_var(rng.pick(universe));
    }
    size_t r = rng.below(100);
    if (r < 45) {
        static const BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul,
                                       BinaryOp::Eq,  BinaryOp::Lt,  BinaryOp::Gt,
                                       BinaryOp::And, BinaryOp::Or};
        BinaryOp op = ops[rng.below(8)];
        return make_binop(op, gen_raw_expr(rng, universe, depth - 1),
                          gen_raw_expr(rng, universe, depth - 1));
    }
    if (r < 52)
        return make_binop(BinaryOp::Div, gen_raw_expr(rng, universe, depth - 1),
                          make_const(rng.value_in(1, 9)));
    if (r < 72 && !universe.empty())
        return make_prev(rng.pick(universe), gen_raw_expr(rng, universe, depth - 1));
    if (r < 90 && !universe.empty())
        return make_hold(rng.pick(universe), gen_raw_expr(rng, universe, depth - 1));
    return make_not(gen_raw_expr(rng, universe, depth - 1));
}

// ---------------------------------------------------------------------------
// Mutation (ill-typed specification generation)
// ---------------------------------------------------------------------------

namespace detail {

inline PacingPtr replace_atom(const PacingPtr& tau, size_t& countdown, const StreamVar& with) {
    return std::visit(overload{
                          [&](const PacingAtom& a) {
                              if (countdown-- == 0) return pacing_atom(with);
                              return pacing_atom(a.input);
                          },
                          [&](const PacingTop&) { return pacing_top(); },
                          [&](const PacingAnd& an) {
                              PacingPtr l = replace_atom(an.lhs, countdown, with);
                              PacingPtr r = replace_atom(an.rhs, countdown, with);
                              return pacing_and(l, r);
                          },
                          [&](const PacingOr& o) {
                              PacingPtr l = replace_atom(o.lhs, countdown, with);
                              PacingPtr r = replace_atom(o.rhs, countdown, with);
                              return pacing_or(l, r);
                          },
                      },
                      tau->node());
}

inline size_t count_accesses(const ExprPtr& e) {
    size_t count = 0;
    for_each_node(e, [&](const Expr& node) {
        if (node.as<VarExpr>() || node.as<PrevExpr>() || node.as<HoldExpr>()) ++count;
    });
    return count;
}

inline size_t count_atom_occurrences(const PacingPtr& tau) {
    return std::visit(overload{
                          [](const PacingAtom&) -> size_t { return 1; },
                          [](const PacingTop&) -> size_t { return 0; },
                          [&](const PacingAnd& an) {
                              return count_atom_occurrences(an.lhs) +
                                     count_atom_occurrences(an.rhs);
                          },
                          [&](const PacingOr& o) {
                              return count_atom_occurrences(o.lhs) +
                                     count_atom_occurrences(o.rhs);
                          },
                      },
                      tau->node());
}

inline ExprPtr retarget_access(const ExprPtr& e, size_t& countdown, const StreamVar& with) {
    return std::visit(
        overload{
            [&](const ConstExpr& c) { return make_const(c.value); },
            [&](const VarExpr& v) {
                if (countdown-- == 0) return make_var(with);
                return make_var(v.var);
            },
            [&](const PrevExpr& p) {
                StreamVar target = countdown-- == 0 ? with : p.target;
                return make_prev(target, retarget_access(p.def, countdown, with));
            },
            [&](const HoldExpr& h) {
                StreamVar target = countdown-- == 0 ? with : h.target;
                return make_hold(target, retarget_access(h.def, countdown, with));
            },
            [&](const BinOpExpr& b) {
                ExprPtr l = retarget_access(b.lhs, countdown, with);
                ExprPtr r = retarget_access(b.rhs, countdown, with);
                return make_binop(b.op, l, r);
            },
            [&](const NotExpr& n) {
                return make_not(retarget_access(n.operand, countdown, with));
            },
        },
        e->node());
}

}  // namespace detail

/// Applies one random mutation near the accept/reject boundary: swap one
/// pacing atom for a different input, re-target one stream access, or swap
/// two equations. The result still passes validate_spec but may or may not
/// still type-check. Returns nullopt when the spec offers nothing to mutate.
inline std::optional<Specification> mutate_spec(const Specification& spec, Rng& rng) {
    enum Kind { SwapAtom, Retarget, ReverseOrder };
    std::vector<Kind> available;

    std::vector<size_t> atom_eqs, access_eqs;
    for (size_t i = 0; i < spec.equations.size(); ++i) {
        if (detail::count_atom_occurrences(spec.equations[i].pacing) > 0 &&
            spec.inputs.size() >= 2)
            atom_eqs.push_back(i);
        if (detail::count_accesses(spec.equations[i].body) > 0 && spec.all_vars().size() >= 2)
            access_eqs.push_back(i);
    }
    if (!atom_eqs.empty()) available.push_back(SwapAtom);
    if (!access_eqs.empty()) available.push_back(Retarget);
    if (spec.equations.size() >= 2) available.push_back(ReverseOrder);
    if (available.empty()) return std::nullopt;

    Specification mutant = spec;
    switch (rng.pick(available)) {
        case SwapAtom: {
            size_t eq = rng.pick(atom_eqs);
            size_t pos = rng.below(detail::count_atom_occurrences(spec.equations[eq].pacing));
            StreamVar with = rng.pick(spec.inputs);
            size_t countdown = pos;
            mutant.equations[eq].pacing =
                detail::replace_atom(spec.equations[eq].pacing, countdown, with);
            break;
        }
        case Retarget: {
            size_t eq = rng.pick(access_eqs);
            size_t pos = rng.below(detail::count_accesses(spec.equations[eq].body));
            std::vector<StreamVar> candidates = spec.all_vars();
            StreamVar with = rng.pick(candidates);
            size_t countdown = pos;
            mutant.equations[eq].body =
                detail::retarget_access(spec.equations[eq].body, countdown, with);
            break;
        }
        case ReverseOrder: {
            size_t i = rng.below(spec.equations.size());
            size_t j = rng.below(spec.equations.size());
            if (i == j) j = (j + 1) % spec.equations.size();
            std::swap(mutant.equations[i], mutant.equations[j]);
            break;
        }
    }
    return mutant;
}

/// Mutates a freshly generated well-typed specification until the result is
/// rejected by check_spec in the given mode. Returns nullopt if no rejected
/// mutant is found within `max_tries`.
inline std::optional<Specification> gen_ill_typed_spec(const GenConfig& cfg, bool reorder,
                                                       size_t max_tries = 64) {
    Specification base = gen_well_typed_spec(cfg);
    Rng rng(cfg.seed ^ 0x6d7574616e74ULL);
    for (size_t attempt = 0; attempt < max_tries; ++attempt) {
        std::optional<Specification> mutant = mutate_spec(base, rng);
        if (!mutant) return std::nullopt;
        if (rng.chance(0.3)) {  // occasionally stack a second mutation
            if (auto twice = mutate_spec(*mutant, rng)) mutant = twice;
        }
        if (!validate_spec(*mutant).empty()) continue;
        if (!check_spec(*mutant, cfg.mode, reorder).ok()) return mutant;
    }
    return std::nullopt;
}

/// True when a report rejects purely because of refinement failures.
inline bool rejects_with_refinement_only(const TypingReport& report) {
    if (report.ok()) return false;
    return std::all_of(report.errors.begin(), report.errors.end(), [](const TypeError& e) {
        return e.kind == TypeError::Kind::RefinementFailure;
    });
}

/// Random permutation of a specification's equations (well-typedness modulo
/// ordering is preserved by construction).
inline Specification shuffle_equations(const Specification& spec, Rng& rng) {
    Specification out = spec;
    for (size_t i = out.equations.size(); i > 1; --i)
        std::swap(out.equations[i - 1], out.equations[rng.below(i)]);
    return out;
}

}  // namespace streamcore::testkit
