#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace streamcore {

/// Stream values are signed 64-bit integers; arithmetic on them is checked.
using Value = std::int64_t;

/// A stream cell: either a value or absent (no value at this time point).
/// Absence is a normal state in asynchronous monitoring, not an error.
using OptValue = std::optional<Value>;

enum class VarKind { Input, Output };

inline const char* to_string(VarKind k) {
    return k == VarKind::Input ? "input" : "output";
}

/// A named stream variable. Input and output namespaces are disjoint:
/// the same name may not be declared in both.
struct StreamVar {
    std::string name;
    VarKind kind = VarKind::Input;

    friend auto operator<=>(const StreamVar&, const StreamVar&) = default;
};

inline StreamVar input_var(std::string name) {
    return StreamVar{std::move(name), VarKind::Input};
}

inline StreamVar output_var(std::string name) {
    return StreamVar{std::move(name), VarKind::Output};
}

inline bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto head = [](char c) {
        return c == '_' || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    };
    auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
    if (!head(s.front())) return false;
    for (char c : s.substr(1))
        if (!tail(c)) return false;
    return true;
}

/// Location of a construct in the source text. Lines and columns are 1-based;
/// a default-constructed span means "no source attached" (programmatic ASTs).
struct SourceSpan {
    int line = 0;
    int column = 0;
    int length = 0;

    bool valid() const { return line > 0; }
    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

/// Result of evaluating a stream expression: a value, or the failure marker
/// raised when a required stream value is unavailable. Failure is distinct
/// from absence; the two never convert into each other.
class EvalOutcome {
public:
    static EvalOutcome ok(Value v) { return EvalOutcome(v); }
    static EvalOutcome fail() { return EvalOutcome(); }

    bool is_ok() const { return value_.has_value(); }
    bool is_fail() const { return !value_.has_value(); }

    Value value() const {
        if (!value_) throw std::logic_error("EvalOutcome::value on failed outcome");
        return *value_;
    }

    friend bool operator==(const EvalOutcome&, const EvalOutcome&) = default;

private:
    EvalOutcome() = default;
    explicit EvalOutcome(Value v) : value_(v) {}
    std::optional<Value> value_;
};

/// Overflow and division by zero are reported through this error, never as
/// the semantic failure marker and never silently wrapped.
class ArithmeticError : public std::runtime_error {
public:
    enum class Kind { Overflow, DivisionByZero };

    ArithmeticError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

inline Value checked_add(Value a, Value b) {
    Value r;
    if (__builtin_add_overflow(a, b, &r))
        throw ArithmeticError(ArithmeticError::Kind::Overflow,
                              "integer overflow in addition");
    return r;
}

inline Value checked_sub(Value a, Value b) {
    Value r;
    if (__builtin_sub_overflow(a, b, &r))
        throw ArithmeticError(ArithmeticError::Kind::Overflow,
                              "integer overflow in subtraction");
    return r;
}

inline Value checked_mul(Value a, Value b) {
    Value r;
    if (__builtin_mul_overflow(a, b, &r))
        throw ArithmeticError(ArithmeticError::Kind::Overflow,
                              "integer overflow in multiplication");
    return r;
}

inline Value checked_div(Value a, Value b) {
    if (b == 0)
        throw ArithmeticError(ArithmeticError::Kind::DivisionByZero,
                              "division by zero");
    if (a == std::numeric_limits<Value>::min() && b == -1)
        throw ArithmeticError(ArithmeticError::Kind::Overflow,
                              "integer overflow in division");
    return a / b;
}

// Visitor helper for std::variant.
template <typename... Ts>
struct overload : Ts... {
    using Ts::operator()...;
};
template <typename... Ts>
overload(Ts...) -> overload<Ts...>;

}  // namespace streamcore
