#pragma once

#include <charconv>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "streamcore/ast.hpp"

namespace streamcore {

/// Syntax or name-resolution error pointing into the input text.
class ParseError : public std::runtime_error {
public:
    ParseError(SourceSpan span, const std::string& message,
               std::vector<std::string> expected = {})
        : std::runtime_error("line " + std::to_string(span.line) + ", column " +
                             std::to_string(span.column) + ": " + message),
          span_(span),
          message_(message),
          expected_(std::move(expected)) {}

    const SourceSpan& span() const { return span_; }
    const std::string& message() const { return message_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    SourceSpan span_;
    std::string message_;
    std::vector<std::string> expected_;
};

namespace detail {

enum class Tok {
    Input, Output, True,
    Ident, Int,
    At, Assign, Colon, Comma, Dot, LParen, RParen,
    Plus, Minus, Star, Slash, EqEq, Lt, Gt, AndAnd, OrOr, Bang, Amp, Pipe,
    End,
};

inline const char* tok_name(Tok t) {
    switch (t) {
        case Tok::Input: return "'input'";
        case Tok::Output: return "'output'";
        case Tok::True: return "'true'";
        case Tok::Ident: return "identifier";
        case Tok::Int: return "integer";
        case Tok::At: return "'@'";
        case Tok::Assign: return "':='";
        case Tok::Colon: return "':'";
        case Tok::Comma: return "','";
        case Tok::Dot: return "'.'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::EqEq: return "'=='";
        case Tok::Lt: return "'<'";
        case Tok::Gt: return "'>'";
        case Tok::AndAnd: return "'&&'";
        case Tok::OrOr: return "'||'";
        case Tok::Bang: return "'!'";
        case Tok::Amp: return "'&'";
        case Tok::Pipe: return "'|'";
        case Tok::End: return "end of input";
    }
    return "?";
}

struct Token {
    Tok kind;
    std::string_view text;
    SourceSpan span;
};

inline std::vector<Token> lex(std::string_view src) {
    std::vector<Token> tokens;
    int line = 1, column = 1;
    size_t i = 0;

    auto span_here = [&](size_t length) {
        return SourceSpan{line, column, static_cast<int>(length)};
    };
    auto error = [&](const std::string& message) {
        throw ParseError(span_here(1), message);
    };
    auto push = [&](Tok kind, size_t length) {
        tokens.push_back({kind, src.substr(i, length), span_here(length)});
        i += length;
        column += static_cast<int>(length);
    };

    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++i;
            ++line;
            column = 1;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            ++column;
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
            size_t len = 1;
            while (i + len < src.size() && (is_identifier(src.substr(i, len + 1)))) ++len;
            std::string_view word = src.substr(i, len);
            Tok kind = word == "input"    ? Tok::Input
                       : word == "output" ? Tok::Output
                       : word == "true"   ? Tok::True
                                          : Tok::Ident;
            push(kind, len);
            continue;
        }
        if (c >= '0' && c <= '9') {
            size_t len = 1;
            while (i + len < src.size() && src[i + len] >= '0' && src[i + len] <= '9') ++len;
            push(Tok::Int, len);
            continue;
        }
        auto two = [&](char a, char b) {
            return c == a && i + 1 < src.size() && src[i + 1] == b;
        };
        if (two(':', '=')) { push(Tok::Assign, 2); continue; }
        if (two('=', '=')) { push(Tok::EqEq, 2); continue; }
        if (two('&', '&')) { push(Tok::AndAnd, 2); continue; }
        if (two('|', '|')) { push(Tok::OrOr, 2); continue; }
        switch (c) {
            case '@': push(Tok::At, 1); continue;
            case ':': push(Tok::Colon, 1); continue;
            case ',': push(Tok::Comma, 1); continue;
            case '.': push(Tok::Dot, 1); continue;
            case '(': push(Tok::LParen, 1); continue;
            case ')': push(Tok::RParen, 1); continue;
            case '+': push(Tok::Plus, 1); continue;
            case '-': push(Tok::Minus, 1); continue;
            case '*': push(Tok::Star, 1); continue;
            case '/': push(Tok::Slash, 1); continue;
            case '<': push(Tok::Lt, 1); continue;
            case '>': push(Tok::Gt, 1); continue;
            case '!': push(Tok::Bang, 1); continue;
            case '&': push(Tok::Amp, 1); continue;
            case '|': push(Tok::Pipe, 1); continue;
            case '=': error("unexpected '='; did you mean '==' or ':='?"); continue;
            default: error(std::string("unexpected character '") + c + "'"); continue;
        }
    }
    // Report end-of-input just past the last token, not on a phantom line.
    SourceSpan end{line, column, 1};
    if (!tokens.empty()) {
        const Token& last = tokens.back();
        end = SourceSpan{last.span.line, last.span.column + last.span.length, 1};
    }
    tokens.push_back({Tok::End, {}, end});
    return tokens;
}

class Parser {
public:
    explicit Parser(std::string_view src) : tokens_(lex(src)) {
        // Declarations may be referenced before they appear, so collect all
        // stream names up front.
        for (size_t i = 0; i + 1 < tokens_.size(); ++i) {
            if (tokens_[i].kind == Tok::Input && tokens_[i + 1].kind == Tok::Ident)
                inputs_.insert(std::string(tokens_[i + 1].text));
            if (tokens_[i].kind == Tok::Output && tokens_[i + 1].kind == Tok::Ident)
                outputs_.insert(std::string(tokens_[i + 1].text));
        }
    }

    Specification parse() {
        Specification spec;
        std::set<std::string> seen_inputs, seen_outputs;
        while (!at(Tok::End)) {
            if (at(Tok::Input)) {
                Token kw = advance();
                Token name = expect(Tok::Ident, "input name");
                if (outputs_.count(std::string(name.text)))
                    throw ParseError(name.span, "'" + std::string(name.text) +
                                                    "' is declared both as input and output");
                if (!seen_inputs.insert(std::string(name.text)).second)
                    throw ParseError(name.span,
                                     "input '" + std::string(name.text) + "' declared twice");
                if (at(Tok::Colon)) {  // optional, ignored type annotation
                    advance();
                    expect(Tok::Ident, "type name");
                }
                spec.inputs.push_back(input_var(std::string(name.text)));
                (void)kw;
            } else if (at(Tok::Output)) {
                Token kw = advance();
                Token name = expect(Tok::Ident, "output name");
                if (inputs_.count(std::string(name.text)))
                    throw ParseError(name.span, "'" + std::string(name.text) +
                                                    "' is declared both as input and output");
                if (!seen_outputs.insert(std::string(name.text)).second)
                    throw ParseError(name.span, "output '" + std::string(name.text) +
                                                    "' has more than one equation");
                expect(Tok::At, "'@' pacing annotation");
                PacingPtr pacing = parse_pacing();
                expect(Tok::Assign, "':='");
                ExprPtr body = parse_expr();
                spec.equations.push_back(
                    {output_var(std::string(name.text)), pacing, body, kw.span});
            } else {
                throw ParseError(peek().span,
                                 "expected a declaration, got " + std::string(tok_name(peek().kind)),
                                 {"'input'", "'output'"});
            }
        }
        return spec;
    }

private:
    std::vector<Token> tokens_;
    size_t pos_ = 0;
    std::set<std::string> inputs_;
    std::set<std::string> outputs_;

    const Token& peek() const { return tokens_[pos_]; }
    bool at(Tok kind) const { return peek().kind == kind; }
    Token advance() { return tokens_[pos_++]; }

    Token expect(Tok kind, const std::string& what) {
        if (!at(kind))
            throw ParseError(peek().span,
                             "expected " + what + ", got " + std::string(tok_name(peek().kind)),
                             {tok_name(kind)});
        return advance();
    }

    StreamVar resolve(const Token& name) const {
        std::string text(name.text);
        if (inputs_.count(text)) return input_var(text);
        if (outputs_.count(text)) return output_var(text);
        throw ParseError(name.span, "undeclared stream '" + text + "'");
    }

    // pacing := and-level { '|' and-level } ; '&' binds tighter than '|'.
    PacingPtr parse_pacing() {
        PacingPtr lhs = parse_pacing_and();
        while (at(Tok::Pipe)) {
            Token op = advance();
            lhs = pacing_or(lhs, parse_pacing_and(), op.span);
        }
        return lhs;
    }

    PacingPtr parse_pacing_and() {
        PacingPtr lhs = parse_pacing_atom();
        while (at(Tok::Amp)) {
            Token op = advance();
            lhs = pacing_and(lhs, parse_pacing_atom(), op.span);
        }
        return lhs;
    }

    PacingPtr parse_pacing_atom() {
        if (at(Tok::True)) return pacing_top(advance().span);
        if (at(Tok::LParen)) {
            advance();
            PacingPtr inner = parse_pacing();
            expect(Tok::RParen, "')'");
            return inner;
        }
        Token name = expect(Tok::Ident, "pacing atom");
        StreamVar var = resolve(name);
        if (var.kind != VarKind::Input)
            throw ParseError(name.span,
                             "pacing atom '" + var.name + "' must name an input stream");
        return pacing_atom(var, name.span);
    }

    // Precedence, loosest first: '||' < '&&' < comparisons < additive <
    // multiplicative < '!' < primaries. All binary operators associate left.
    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (at(Tok::OrOr)) {
            Token op = advance();
            lhs = make_binop(BinaryOp::Or, lhs, parse_and(), op.span);
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_cmp();
        while (at(Tok::AndAnd)) {
            Token op = advance();
            lhs = make_binop(BinaryOp::And, lhs, parse_cmp(), op.span);
        }
        return lhs;
    }

    ExprPtr parse_cmp() {
        ExprPtr lhs = parse_add();
        for (;;) {
            BinaryOp op;
            if (at(Tok::EqEq)) op = BinaryOp::Eq;
            else if (at(Tok::Lt)) op = BinaryOp::Lt;
            else if (at(Tok::Gt)) op = BinaryOp::Gt;
            else return lhs;
            Token tok = advance();
            lhs = make_binop(op, lhs, parse_add(), tok.span);
        }
    }

    ExprPtr parse_add() {
        ExprPtr lhs = parse_mul();
        for (;;) {
            BinaryOp op;
            if (at(Tok::Plus)) op = BinaryOp::Add;
            else if (at(Tok::Minus)) op = BinaryOp::Sub;
            else return lhs;
            Token tok = advance();
            lhs = make_binop(op, lhs, parse_mul(), tok.span);
        }
    }

    ExprPtr parse_mul() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            BinaryOp op;
            if (at(Tok::Star)) op = BinaryOp::Mul;
            else if (at(Tok::Slash)) op = BinaryOp::Div;
            else return lhs;
            Token tok = advance();
            lhs = make_binop(op, lhs, parse_unary(), tok.span);
        }
    }

    ExprPtr parse_unary() {
        if (at(Tok::Bang)) {
            Token op = advance();
            return make_not(parse_unary(), op.span);
        }
        return parse_primary();
    }

    Value parse_int(const Token& tok, bool negative) {
        std::string text = negative ? "-" + std::string(tok.text) : std::string(tok.text);
        Value value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size())
            throw ParseError(tok.span, "integer literal out of range");
        return value;
    }

    ExprPtr parse_primary() {
        if (at(Tok::Int)) {
            Token tok = advance();
            return make_const(parse_int(tok, false), tok.span);
        }
        if (at(Tok::Minus)) {
            Token minus = advance();
            Token tok = expect(Tok::Int, "integer literal");
            return make_const(parse_int(tok, true), minus.span);
        }
        if (at(Tok::LParen)) {
            advance();
            ExprPtr inner = parse_expr();
            expect(Tok::RParen, "')'");
            return inner;
        }
        Token name = expect(Tok::Ident, "expression");
        StreamVar var = resolve(name);
        if (at(Tok::Dot)) {
            advance();
            Token access = expect(Tok::Ident, "'prev' or 'hold'");
            bool is_prev = access.text == "prev";
            if (!is_prev && access.text != "hold")
                throw ParseError(access.span,
                                 "unknown stream access '" + std::string(access.text) + "'",
                                 {"'prev'", "'hold'"});
            expect(Tok::LParen, "'('");
            Token kw = expect(Tok::Ident, "'or'");
            if (kw.text != "or")
                throw ParseError(kw.span, "expected 'or' before the default expression",
                                 {"'or'"});
            expect(Tok::Colon, "':'");
            ExprPtr def = parse_expr();
            expect(Tok::RParen, "')'");
            return is_prev ? make_prev(var, def, name.span) : make_hold(var, def, name.span);
        }
        return make_var(var, name.span);
    }
};

}  // namespace detail

/// Parses the textual specification format. Throws ParseError on malformed
/// syntax and on name-resolution problems (undeclared streams, duplicate
/// equations, pacing atoms that are not inputs), so every returned
/// Specification passes validate_spec.
inline Specification parse_spec(std::string_view text) {
    return detail::Parser(text).parse();
}

// ---------------------------------------------------------------------------
// Pretty-printing
// ---------------------------------------------------------------------------

namespace detail {

inline void format_pacing(const PacingPtr& tau, int min_prec, std::string& out) {
    // Precedence: '|' = 1, '&' = 2, atoms/true = 3.
    std::visit(overload{
                   [&](const PacingAtom& a) { out += a.input.name; },
                   [&](const PacingTop&) { out += "true"; },
                   [&](const PacingAnd& an) {
                       bool parens = min_prec > 2;
                       if (parens) out += "(";
                       format_pacing(an.lhs, 2, out);
                       out += " & ";
                       format_pacing(an.rhs, 3, out);
                       if (parens) out += ")";
                   },
                   [&](const PacingOr& o) {
                       bool parens = min_prec > 1;
                       if (parens) out += "(";
                       format_pacing(o.lhs, 1, out);
                       out += " | ";
                       format_pacing(o.rhs, 2, out);
                       if (parens) out += ")";
                   },
               },
               tau->node());
}

inline int binop_prec(BinaryOp op) {
    switch (op) {
        case BinaryOp::Or: return 1;
        case BinaryOp::And: return 2;
        case BinaryOp::Eq:
        case BinaryOp::Lt:
        case BinaryOp::Gt: return 3;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 4;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 5;
    }
    return 0;
}

inline void format_expr(const ExprPtr& e, int min_prec, std::string& out) {
    std::visit(overload{
                   [&](const ConstExpr& c) { out += std::to_string(c.value); },
                   [&](const VarExpr& v) { out += v.var.name; },
                   [&](const PrevExpr& p) {
                       out += p.target.name + ".prev(or: ";
                       format_expr(p.def, 1, out);
                       out += ")";
                   },
                   [&](const HoldExpr& h) {
                       out += h.target.name + ".hold(or: ";
                       format_expr(h.def, 1, out);
                       out += ")";
                   },
                   [&](const BinOpExpr& b) {
                       int prec = binop_prec(b.op);
                       bool parens = min_prec > prec;
                       if (parens) out += "(";
                       format_expr(b.lhs, prec, out);
                       out += std::string(" ") + to_string(b.op) + " ";
                       format_expr(b.rhs, prec + 1, out);
                       if (parens) out += ")";
                   },
                   [&](const NotExpr& n) {
                       bool parens = min_prec > 6;
                       if (parens) out += "(";
                       out += "!";
                       format_expr(n.operand, 6, out);
                       if (parens) out += ")";
                   },
               },
               e->node());
}

}  // namespace detail

inline std::string format_pacing(const PacingPtr& tau) {
    std::string out;
    detail::format_pacing(tau, 1, out);
    return out;
}

inline std::string format_expr(const ExprPtr& e) {
    std::string out;
    detail::format_expr(e, 1, out);
    return out;
}

/// Renders a specification back into the textual format; parsing the result
/// yields a structurally equal specification.
inline std::string format_spec(const Specification& spec) {
    std::string out;
    for (const auto& in : spec.inputs) out += "input " + in.name + "\n";
    if (!spec.inputs.empty() && !spec.equations.empty()) out += "\n";
    for (const auto& eq : spec.equations) {
        out += "output " + eq.target.name + " @" + format_pacing(eq.pacing) +
               " := " + format_expr(eq.body) + "\n";
    }
    return out;
}

}  // namespace streamcore
