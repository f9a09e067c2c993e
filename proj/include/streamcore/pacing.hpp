#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "streamcore/ast.hpp"
#include "streamcore/trace.hpp"

namespace streamcore {

/// Which inputs carry a value at one time point.
using PresenceRow = std::map<StreamVar, bool>;

/// True iff the time point described by `row` is denoted by `tau`:
/// an atom holds when its input has a value, Top always holds, and the
/// connectives are evaluated as conjunction and disjunction.
inline bool fires(const PacingPtr& tau, const PresenceRow& row) {
    return std::visit(overload{
                          [&](const PacingAtom& a) {
                              auto it = row.find(a.input);
                              if (it == row.end())
                                  throw std::out_of_range("presence row has no entry for '" +
                                                          a.input.name + "'");
                              return it->second;
                          },
                          [](const PacingTop&) { return true; },
                          [&](const PacingAnd& an) {
                              return fires(an.lhs, row) && fires(an.rhs, row);
                          },
                          [&](const PacingOr& o) {
                              return fires(o.lhs, row) || fires(o.rhs, row);
                          },
                      },
                      tau->node());
}

inline PresenceRow presence_row(const StreamTrace& inputs, size_t n,
                                const std::set<StreamVar>& vars) {
    PresenceRow row;
    for (const auto& v : vars) row[v] = inputs.at(v, n).has_value();
    return row;
}

/// The finite-prefix denotation of a pacing annotation: all time points
/// n < horizon at which `tau` fires on the input trace.
inline std::set<size_t> denotation_times(const PacingPtr& tau, const StreamTrace& inputs) {
    const auto vars = atoms(tau);
    std::set<size_t> times;
    for (size_t n = 0; n < inputs.horizon(); ++n)
        if (fires(tau, presence_row(inputs, n, vars))) times.insert(n);
    return times;
}

/// Outcome of a refinement check. When the relation does not hold, `witness`
/// is a valuation of the involved atoms on which tau_must fires but tau_can
/// does not.
struct EntailResult {
    bool holds = false;
    std::map<StreamVar, bool> witness;
};

namespace detail {

// Disjunctive normal form of a positive formula, as bitmasks over an interned
// atom list. Positive formulas are monotone, so tau1 entails tau2 exactly
// when tau2 holds at every monomial of DNF(tau1) taken as a minimal valuation.
inline void dnf_masks(const PacingPtr& tau, const std::vector<StreamVar>& interned,
                      std::vector<std::uint32_t>& out) {
    std::visit(overload{
                   [&](const PacingAtom& a) {
                       for (size_t i = 0; i < interned.size(); ++i) {
                           if (interned[i] == a.input) {
                               out.push_back(1u << i);
                               return;
                           }
                       }
                       throw std::logic_error("atom '" + a.input.name +
                                              "' missing from interned list");
                   },
                   [&](const PacingTop&) { out.push_back(0); },
                   [&](const PacingOr& o) {
                       dnf_masks(o.lhs, interned, out);
                       dnf_masks(o.rhs, interned, out);
                   },
                   [&](const PacingAnd& an) {
                       std::vector<std::uint32_t> left, right;
                       dnf_masks(an.lhs, interned, left);
                       dnf_masks(an.rhs, interned, right);
                       if (left.size() * right.size() > (1u << 20))
                           throw std::length_error("pacing formula DNF too large");
                       for (auto l : left)
                           for (auto r : right) out.push_back(l | r);
                   },
               },
               tau->node());
}

inline bool eval_mask(const PacingPtr& tau, const std::vector<StreamVar>& interned,
                      std::uint32_t valuation) {
    return std::visit(overload{
                          [&](const PacingAtom& a) {
                              for (size_t i = 0; i < interned.size(); ++i)
                                  if (interned[i] == a.input)
                                      return (valuation >> i & 1u) != 0;
                              return false;
                          },
                          [](const PacingTop&) { return true; },
                          [&](const PacingAnd& an) {
                              return eval_mask(an.lhs, interned, valuation) &&
                                     eval_mask(an.rhs, interned, valuation);
                          },
                          [&](const PacingOr& o) {
                              return eval_mask(o.lhs, interned, valuation) ||
                                     eval_mask(o.rhs, interned, valuation);
                          },
                      },
                      tau->node());
}

}  // namespace detail

/// Decides the refinement relation: tau_must entails tau_can iff every time
/// point denoted by tau_must is denoted by tau_can, for all input traces.
/// Decided propositionally through the monomials of DNF(tau_must).
inline EntailResult entails_with_witness(const PacingPtr& tau_must, const PacingPtr& tau_can) {
    std::set<StreamVar> atom_set = atoms(tau_must);
    collect_atoms(tau_can, atom_set);
    std::vector<StreamVar> interned(atom_set.begin(), atom_set.end());
    if (interned.size() > 32)
        throw std::length_error("more than 32 distinct pacing atoms");

    std::vector<std::uint32_t> monomials;
    detail::dnf_masks(tau_must, interned, monomials);

    for (auto m : monomials) {
        if (!detail::eval_mask(tau_can, interned, m)) {
            EntailResult result;
            result.holds = false;
            for (size_t i = 0; i < interned.size(); ++i)
                result.witness[interned[i]] = (m >> i & 1u) != 0;
            return result;
        }
    }
    return EntailResult{true, {}};
}

inline bool entails(const PacingPtr& tau_must, const PacingPtr& tau_can) {
    return entails_with_witness(tau_must, tau_can).holds;
}

}  // namespace streamcore
