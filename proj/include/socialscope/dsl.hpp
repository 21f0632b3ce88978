#pragma once

// Let-bound algebra scripts:
//
//   program   := stmt* ;  stmt := NAME '=' expr ;
//   expr      := NAME | op '(' args ')' ;
//   condition := '[' (pred (',' pred)*)? (';' 'kw' ':' STRING)? ']' ;
//   pred      := NAME ('='|'!='|'<'|'<='|'>'|'>=') literal | NAME 'has' '{' literal-list '}' ;
//   delta     := '(' direction ',' direction ')' ;  direction := 'src' | 'tgt' .
//
// Operator argument lists, aggregate specs and composition blocks are
// documented in docs/dsl.md.

#include <cctype>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "socialscope/algebra.hpp"

namespace socialscope::dsl {

enum class OpKind { Ref, NSel, LSel, Union, Intersect, NMinus, LMinus, Compose, SemiJoin, NAggr, LAggr, PAggr };

inline std::string_view op_name(OpKind op)
{
    switch (op) {
    case OpKind::Ref: return "ref";
    case OpKind::NSel: return "nsel";
    case OpKind::LSel: return "lsel";
    case OpKind::Union: return "union";
    case OpKind::Intersect: return "intersect";
    case OpKind::NMinus: return "nminus";
    case OpKind::LMinus: return "lminus";
    case OpKind::Compose: return "compose";
    case OpKind::SemiJoin: return "semijoin";
    case OpKind::NAggr: return "naggr";
    case OpKind::LAggr: return "laggr";
    case OpKind::PAggr: return "paggr";
    }
    return "?";
}

inline std::optional<OpKind> op_from_name(std::string_view name)
{
    static const std::pair<std::string_view, OpKind> table[] = {
        {"nsel", OpKind::NSel}, {"lsel", OpKind::LSel}, {"union", OpKind::Union},
        {"intersect", OpKind::Intersect}, {"nminus", OpKind::NMinus}, {"lminus", OpKind::LMinus},
        {"compose", OpKind::Compose}, {"semijoin", OpKind::SemiJoin}, {"naggr", OpKind::NAggr},
        {"laggr", OpKind::LAggr}, {"paggr", OpKind::PAggr},
    };
    for (const auto& [n, op] : table)
        if (n == name)
            return op;
    return std::nullopt;
}

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// One operator application. Only the fields relevant to `op` are meaningful.
struct Expr {
    OpKind op = OpKind::Ref;
    std::string ref;
    std::vector<ExprPtr> inputs;
    Condition cond;
    DirectionalCondition delta;
    Direction dir = Direction::Src;
    std::string att;
    AggSpec agg = SafExpr{};
    std::vector<NamedAgg> specs;
    CompositionFn cf;
    GraphPattern pattern;
};

inline std::string specs_text(const std::vector<NamedAgg>& specs)
{
    std::string out = "{";
    for (std::size_t i = 0; i < specs.size(); ++i)
        out += (i ? ", " : "") + specs[i].attr + " := " + to_text(specs[i].spec);
    return out + "}";
}

/// Operator-specific parameters in surface syntax, inputs excluded.
inline std::string params_text(const Expr& e)
{
    switch (e.op) {
    case OpKind::NSel:
    case OpKind::LSel: return to_text(e.cond);
    case OpKind::Compose: return to_text(e.delta) + ", " + e.cf.text();
    case OpKind::SemiJoin: return to_text(e.delta);
    case OpKind::NAggr:
        return to_text(e.cond) + ", " + std::string(direction_name(e.dir)) + ", " + e.att + ", " + to_text(e.agg);
    case OpKind::LAggr: return to_text(e.cond) + ", " + specs_text(e.specs);
    case OpKind::PAggr: return e.pattern.text() + ", " + specs_text(e.specs);
    default: return {};
    }
}

inline std::string to_text(const Expr& e)
{
    if (e.op == OpKind::Ref)
        return e.ref;
    std::string out = std::string(op_name(e.op)) + "(";
    for (std::size_t i = 0; i < e.inputs.size(); ++i)
        out += (i ? ", " : "") + to_text(*e.inputs[i]);
    std::string params = params_text(e);
    if (!params.empty())
        out += ", " + params;
    return out + ")";
}

struct Statement {
    std::string name;
    ExprPtr expr;
    std::size_t line = 0;
};

struct Program {
    std::vector<Statement> stmts;
};

inline std::string to_text(const Program& p)
{
    std::string out;
    for (const auto& s : p.stmts)
        out += s.name + " = " + to_text(*s.expr) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Name, Number, String, Var, Sym, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t col = 1;
};

namespace detail {

inline bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

inline std::vector<Token> lex(std::string_view src)
{
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n')
                advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        if (name_start(c)) {
            std::size_t j = i;
            while (j < src.size() && name_char(src[j]))
                ++j;
            t.kind = Tok::Name;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))
            || (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.'))
                ++j;
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-'))
                    ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    j = k;
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
                        ++j;
                }
            }
            t.kind = Tok::Number;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (c == '\'' || c == '"') {
            std::size_t j = i + 1;
            std::string value;
            bool closed = false;
            while (j < src.size()) {
                if (src[j] == '\\' && j + 1 < src.size()) {
                    value.push_back(src[j + 1]);
                    j += 2;
                    continue;
                }
                if (src[j] == c) {
                    closed = true;
                    break;
                }
                if (src[j] == '\n')
                    break;
                value.push_back(src[j++]);
            }
            if (!closed)
                throw SyntaxError(line, col, "closing quote");
            t.kind = Tok::String;
            t.text = std::move(value);
            advance(j + 1 - i);
        } else if (c == '$') {
            std::size_t j = i + 1;
            while (j < src.size() && name_char(src[j]))
                ++j;
            if (j == i + 1)
                throw SyntaxError(line, col, "variable name after '$'");
            t.kind = Tok::Var;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else {
            static constexpr std::string_view two[] = {"!=", "<=", ">=", ":="};
            static constexpr std::string_view one = "=<>()[]{},;:.@+-*/";
            std::string_view rest = src.substr(i);
            bool matched = false;
            for (auto s : two) {
                if (rest.substr(0, 2) == s) {
                    t.text = std::string(s);
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                if (one.find(c) == std::string_view::npos)
                    throw SyntaxError(line, col, "a token (unexpected character '" + std::string(1, c) + "')");
                t.text = std::string(1, c);
            }
            t.kind = Tok::Sym;
            advance(t.text.size());
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::End;
    if (!out.empty()) {
        end.line = out.back().line;
        end.col = out.back().col;
    }
    out.push_back(end);
    return out;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(lex(src)) {}

    Program program()
    {
        Program p;
        std::set<std::string> bound;
        while (peek().kind != Tok::End) {
            Token name = expect_name("binding name");
            expect_sym("=");
            Statement s{name.text, expr(), name.line};
            if (!bound.insert(s.name).second)
                fail(ErrorCode::DuplicateBinding, s.name + " (line " + std::to_string(name.line) + ")");
            p.stmts.push_back(std::move(s));
        }
        return p;
    }

    Condition lone_condition()
    {
        Condition c = condition();
        if (peek().kind != Tok::End)
            error("end of condition");
        return c;
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void error(const std::string& expected) const
    {
        throw SyntaxError(peek().line, peek().col, expected);
    }

    bool at_sym(std::string_view s) const { return peek().kind == Tok::Sym && peek().text == s; }
    bool at_name(std::string_view s) const { return peek().kind == Tok::Name && peek().text == s; }

    void expect_sym(std::string_view s)
    {
        if (!at_sym(s))
            error("'" + std::string(s) + "'");
        next();
    }

    Token expect_name(const std::string& what)
    {
        if (peek().kind != Tok::Name)
            error(what);
        return next();
    }

    void expect_keyword(std::string_view w)
    {
        if (!at_name(w))
            error("'" + std::string(w) + "'");
        next();
    }

    ExprPtr expr()
    {
        Token name = expect_name("graph name or operator");
        if (!at_sym("(")) {
            auto e = std::make_shared<Expr>();
            e->op = OpKind::Ref;
            e->ref = name.text;
            return e;
        }
        auto op = op_from_name(name.text);
        if (!op)
            fail(ErrorCode::UnknownOperator,
                name.text + " (line " + std::to_string(name.line) + ", col " + std::to_string(name.col) + ")");
        next();
        auto e = std::make_shared<Expr>();
        e->op = *op;
        e->inputs.push_back(expr());
        switch (*op) {
        case OpKind::NSel:
        case OpKind::LSel:
            expect_sym(",");
            e->cond = condition();
            break;
        case OpKind::Union:
        case OpKind::Intersect:
        case OpKind::NMinus:
        case OpKind::LMinus:
            expect_sym(",");
            e->inputs.push_back(expr());
            break;
        case OpKind::Compose:
            expect_sym(",");
            e->inputs.push_back(expr());
            expect_sym(",");
            e->delta = delta();
            expect_sym(",");
            e->cf = cf_block();
            break;
        case OpKind::SemiJoin:
            expect_sym(",");
            e->inputs.push_back(expr());
            expect_sym(",");
            e->delta = delta();
            break;
        case OpKind::NAggr:
            expect_sym(",");
            e->cond = condition();
            expect_sym(",");
            e->dir = direction();
            expect_sym(",");
            e->att = expect_name("destination attribute").text;
            expect_sym(",");
            e->agg = agg_spec();
            break;
        case OpKind::LAggr:
            expect_sym(",");
            e->cond = condition();
            expect_sym(",");
            e->specs = spec_block();
            break;
        case OpKind::PAggr:
            expect_sym(",");
            e->pattern = pattern();
            expect_sym(",");
            e->specs = spec_block();
            break;
        case OpKind::Ref: break;
        }
        expect_sym(")");
        return e;
    }

    Scalar literal()
    {
        if (peek().kind == Tok::String)
            return Scalar(next().text);
        bool negative = false;
        if (at_sym("-")) {
            next();
            negative = true;
        }
        if (peek().kind != Tok::Number)
            error("literal (string or number)");
        double v = std::strtod(next().text.c_str(), nullptr);
        return Scalar(negative ? -v : v);
    }

    Condition condition()
    {
        expect_sym("[");
        Condition c;
        if (!at_sym(";") && !at_sym("]")) {
            c.preds.push_back(predicate());
            while (at_sym(",")) {
                next();
                c.preds.push_back(predicate());
            }
        }
        if (at_sym(";")) {
            next();
            expect_keyword("kw");
            expect_sym(":");
            if (peek().kind != Tok::String)
                error("keyword string");
            for (auto& t : tokenize(next().text))
                c.keywords.push_back(std::move(t));
        }
        expect_sym("]");
        return c;
    }

    StructPredicate predicate()
    {
        std::string attr = expect_name("attribute name").text;
        if (at_name("has")) {
            next();
            expect_sym("{");
            std::vector<Scalar> values{literal()};
            while (at_sym(",")) {
                next();
                values.push_back(literal());
            }
            expect_sym("}");
            return StructPredicate{std::move(attr), CompareOp::ContainsAll, std::move(values)};
        }
        static const std::pair<std::string_view, CompareOp> ops[] = {
            {"=", CompareOp::Eq}, {"!=", CompareOp::Ne}, {"<", CompareOp::Lt},
            {"<=", CompareOp::Le}, {">", CompareOp::Gt}, {">=", CompareOp::Ge},
        };
        for (const auto& [sym, op] : ops) {
            if (at_sym(sym)) {
                next();
                return StructPredicate{std::move(attr), op, {literal()}};
            }
        }
        error("comparison operator or 'has'");
    }

    Direction direction()
    {
        if (at_name("src") || at_name("tgt"))
            return next().text == "src" ? Direction::Src : Direction::Tgt;
        error("direction 'src' or 'tgt'");
    }

    DirectionalCondition delta()
    {
        expect_sym("(");
        DirectionalCondition d;
        d.d1 = direction();
        expect_sym(",");
        d.d2 = direction();
        expect_sym(")");
        return d;
    }

    std::optional<std::size_t> position()
    {
        if (!at_sym("@"))
            return std::nullopt;
        next();
        if (peek().kind != Tok::Number || peek().text.find_first_not_of("0123456789") != std::string::npos)
            error("step position (non-negative integer)");
        return static_cast<std::size_t>(std::stoul(next().text));
    }

    std::pair<std::string, std::optional<std::size_t>> attr_ref()
    {
        std::string name = expect_name("attribute name").text;
        return {std::move(name), position()};
    }

    AggSpec agg_spec()
    {
        if (peek().kind == Tok::String)
            return ConstString{next().text};
        if ((at_name("saf") || at_name("any")) && peek(1).kind == Tok::Sym && peek(1).text == "(") {
            bool saf = next().text == "saf";
            expect_sym("(");
            auto [name, pos] = attr_ref();
            expect_sym(")");
            if (saf)
                return SafExpr{std::move(name), pos};
            return CopyAny{std::move(name), pos};
        }
        return naf();
    }

    std::vector<NamedAgg> spec_block()
    {
        expect_sym("{");
        std::vector<NamedAgg> specs;
        do {
            if (!specs.empty())
                next();
            std::string att = expect_name("destination attribute").text;
            expect_sym(":=");
            specs.push_back({std::move(att), agg_spec()});
        } while (at_sym(","));
        expect_sym("}");
        return specs;
    }

    NafExpr naf()
    {
        NafExpr lhs = naf_term();
        while (at_sym("+") || at_sym("-")) {
            ArithOp op = next().text == "+" ? ArithOp::Add : ArithOp::Sub;
            lhs = NafExpr::arith(op, std::move(lhs), naf_term());
        }
        return lhs;
    }

    NafExpr naf_term()
    {
        NafExpr lhs = naf_factor();
        while (at_sym("*") || at_sym("/")) {
            ArithOp op = next().text == "*" ? ArithOp::Mul : ArithOp::Div;
            lhs = NafExpr::arith(op, std::move(lhs), naf_factor());
        }
        return lhs;
    }

    NafExpr naf_factor()
    {
        if (peek().kind == Tok::Number) {
            const std::string& t = peek().text;
            if (t != "0" && t != "1")
                error("numeric aggregate constant 0 or 1");
            return next().text == "0" ? NafExpr::zero() : NafExpr::one();
        }
        if (peek().kind == Tok::Var) {
            if (peek().text != "$x")
                error("bound value '$x'");
            next();
            return NafExpr::bound_value();
        }
        if (at_sym("(")) {
            next();
            NafExpr inner = naf();
            expect_sym(")");
            return inner;
        }
        if (peek().kind != Tok::Name)
            error("numeric aggregate expression");
        bool call = peek(1).kind == Tok::Sym && peek(1).text == "(";
        std::string name = peek().text;
        if (call && (name == "sumover" || name == "prodover")) {
            next();
            expect_sym("(");
            NafExpr body = naf();
            std::string over;
            std::optional<std::size_t> pos;
            if (at_name("over")) {
                next();
                std::tie(over, pos) = attr_ref();
            }
            expect_sym(")");
            return name == "sumover" ? NafExpr::sum_over(std::move(body), std::move(over), pos)
                                     : NafExpr::prod_over(std::move(body), std::move(over), pos);
        }
        if (call && name == "count") {
            next();
            expect_sym("(");
            expect_sym(")");
            return NafExpr::count();
        }
        static const std::pair<std::string_view, BuiltinFn> fns[] = {
            {"sum", BuiltinFn::Sum}, {"avg", BuiltinFn::Avg}, {"min", BuiltinFn::Min}, {"max", BuiltinFn::Max},
        };
        if (call) {
            for (const auto& [fn_name, fn] : fns) {
                if (name == fn_name) {
                    next();
                    expect_sym("(");
                    auto [attr, pos] = attr_ref();
                    expect_sym(")");
                    return NafExpr::builtin(fn, std::move(attr), pos);
                }
            }
            error("aggregate function (count, sum, avg, min, max, sumover, prodover)");
        }
        auto [attr, pos] = attr_ref();
        return NafExpr::attr(std::move(attr), pos);
    }

    std::pair<Side, std::string> side_attr()
    {
        std::string which = expect_name("'left' or 'right'").text;
        if (which != "left" && which != "right")
            throw SyntaxError(toks_[pos_ - 1].line, toks_[pos_ - 1].col, "'left' or 'right'");
        bool left = which == "left";
        expect_sym(".");
        std::string name = expect_name("attribute name").text;
        if ((name == "src" || name == "tgt") && at_sym(".")) {
            next();
            std::string attr = expect_name("attribute name").text;
            Side s = left ? (name == "src" ? Side::LeftSrc : Side::LeftTgt)
                          : (name == "src" ? Side::RightSrc : Side::RightTgt);
            return {s, std::move(attr)};
        }
        return {left ? Side::LeftLink : Side::RightLink, std::move(name)};
    }

    CfOutput cf_output()
    {
        if (peek().kind == Tok::String)
            return ConstString{next().text};
        bool call = peek(1).kind == Tok::Sym && peek(1).text == "(";
        if (call && at_name("copy")) {
            next();
            expect_sym("(");
            auto [side, attr] = side_attr();
            expect_sym(")");
            return CopyFrom{side, std::move(attr)};
        }
        if (call && at_name("jaccard")) {
            next();
            expect_sym("(");
            auto [ls, la] = side_attr();
            expect_sym(",");
            auto [rs, ra] = side_attr();
            expect_sym(")");
            return JaccardOf{ls, std::move(la), rs, std::move(ra)};
        }
        if (call && at_name("saf")) {
            next();
            expect_sym("(");
            auto [attr, pos] = attr_ref();
            expect_sym(")");
            return SafExpr{std::move(attr), pos};
        }
        return naf();
    }

    CompositionFn cf_block()
    {
        expect_sym("{");
        CompositionFn f;
        do {
            if (!f.outputs.empty())
                next();
            Token att = expect_name("output attribute");
            expect_sym(":=");
            if (!f.outputs.emplace(att.text, cf_output()).second)
                throw SyntaxError(att.line, att.col, "distinct output attribute names");
        } while (at_sym(","));
        expect_sym("}");
        return f;
    }

    GraphPattern pattern()
    {
        expect_keyword("path");
        expect_sym("(");
        GraphPattern gp;
        do {
            if (!gp.steps.empty())
                next();
            Condition c = condition();
            gp.steps.push_back({std::move(c), direction()});
        } while (at_sym(","));
        expect_sym(")");
        return gp;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses a script. Throws SyntaxError (positioned), DuplicateBinding or
/// UnknownOperator.
inline Program parse(std::string_view text)
{
    return detail::Parser(text).program();
}

/// Parses one bracketed condition such as "[type='destination'; kw:'denver']".
inline Condition parse_condition(std::string_view text)
{
    return detail::Parser(text).lone_condition();
}

// ---------------------------------------------------------------------------
// Plan

struct PlanNode {
    ExprPtr expr;                  // operator and parameters; inputs resolved below
    std::vector<std::size_t> inputs;
    std::string leaf;              // non-empty for input-graph leaves
    std::string owner;             // binding that introduced this node
    std::string key;               // structural identity
    bool is_leaf() const { return !leaf.empty(); }
};

/// Operator DAG in topological order (inputs always precede their users).
struct Plan {
    std::vector<PlanNode> nodes;
    std::vector<std::pair<std::string, std::size_t>> bindings;

    std::set<std::string> leaves() const
    {
        std::set<std::string> out;
        for (const auto& n : nodes)
            if (n.is_leaf())
                out.insert(n.leaf);
        return out;
    }

    std::size_t operator_count() const
    {
        std::size_t n = 0;
        for (const auto& node : nodes)
            n += node.is_leaf() ? 0 : 1;
        return n;
    }
};

struct CompileOptions {
    /// Names that may appear as input graphs. When unset, every name that is
    /// never bound by the program becomes a leaf.
    std::optional<std::set<std::string>> inputs;
    /// Merge structurally equal subexpressions into one plan node.
    bool share = true;
};

namespace detail {

class Compiler {
public:
    Compiler(const Program& p, const CompileOptions& opts) : program_(p), opts_(opts)
    {
        for (const auto& s : p.stmts)
            all_bound_.insert(s.name);
    }

    Plan run()
    {
        for (const auto& s : program_.stmts) {
            owner_ = s.name;
            std::size_t idx = node(*s.expr, s.expr);
            bound_[s.name] = idx;
            plan_.bindings.emplace_back(s.name, idx);
        }
        return std::move(plan_);
    }

private:
    std::size_t node(const Expr& e, const ExprPtr& ptr)
    {
        if (e.op == OpKind::Ref)
            return reference(e.ref);
        std::vector<std::size_t> inputs;
        std::string key = std::string(op_name(e.op)) + "(";
        for (const auto& in : e.inputs) {
            inputs.push_back(node(*in, in));
            key += "#" + std::to_string(inputs.back()) + ",";
        }
        key += params_text(e) + ")";
        if (opts_.share) {
            auto it = by_key_.find(key);
            if (it != by_key_.end())
                return it->second;
        }
        PlanNode n;
        n.expr = ptr;
        n.inputs = std::move(inputs);
        n.owner = owner_;
        n.key = key;
        plan_.nodes.push_back(std::move(n));
        std::size_t idx = plan_.nodes.size() - 1;
        by_key_.emplace(key, idx);
        return idx;
    }

    std::size_t reference(const std::string& name)
    {
        if (auto it = bound_.find(name); it != bound_.end())
            return it->second;
        bool allowed = opts_.inputs ? opts_.inputs->count(name) != 0 : all_bound_.count(name) == 0;
        if (!allowed)
            fail(ErrorCode::UnboundReference, name);
        if (auto it = leaves_.find(name); it != leaves_.end())
            return it->second;
        PlanNode n;
        n.leaf = name;
        n.owner = owner_;
        n.key = "leaf:" + name;
        plan_.nodes.push_back(std::move(n));
        leaves_[name] = plan_.nodes.size() - 1;
        return plan_.nodes.size() - 1;
    }

    const Program& program_;
    const CompileOptions& opts_;
    Plan plan_;
    std::set<std::string> all_bound_;
    std::map<std::string, std::size_t> bound_;
    std::map<std::string, std::size_t> leaves_;
    std::unordered_map<std::string, std::size_t> by_key_;
    std::string owner_;
};

inline Graph apply(const Expr& e, const std::vector<const Graph*>& in)
{
    switch (e.op) {
    case OpKind::NSel: return node_select(*in[0], e.cond);
    case OpKind::LSel: return link_select(*in[0], e.cond);
    case OpKind::Union: return graph_union(*in[0], *in[1]);
    case OpKind::Intersect: return graph_intersect(*in[0], *in[1]);
    case OpKind::NMinus: return node_minus(*in[0], *in[1]);
    case OpKind::LMinus: return link_minus(*in[0], *in[1]);
    case OpKind::Compose: return compose(*in[0], *in[1], e.delta, e.cf);
    case OpKind::SemiJoin: return semi_join(*in[0], *in[1], e.delta);
    case OpKind::NAggr: return node_aggregate(*in[0], e.cond, e.dir, e.att, e.agg);
    case OpKind::LAggr: return link_aggregate(*in[0], e.cond, e.specs);
    case OpKind::PAggr: return pattern_aggregate(*in[0], e.pattern, e.specs);
    case OpKind::Ref: break;
    }
    fail(ErrorCode::InvalidArgument, "reference node cannot be applied");
}

} // namespace detail

inline Plan compile(const Program& p, const CompileOptions& opts = {})
{
    return detail::Compiler(p, opts).run();
}

using Bindings = std::map<std::string, Graph>;

/// Evaluates the plan in topological order; returns every binding's graph.
/// Operator failures are rethrown as ExecutionError naming the binding.
inline Bindings execute(const Plan& plan, const Bindings& inputs)
{
    std::vector<std::optional<Graph>> results(plan.nodes.size());
    for (std::size_t i = 0; i < plan.nodes.size(); ++i) {
        const PlanNode& n = plan.nodes[i];
        if (n.is_leaf()) {
            auto it = inputs.find(n.leaf);
            if (it == inputs.end())
                fail(ErrorCode::UnboundReference, "input graph '" + n.leaf + "' not supplied");
            results[i] = it->second;
            continue;
        }
        std::vector<const Graph*> in;
        for (std::size_t j : n.inputs)
            in.push_back(&*results[j]);
        try {
            results[i] = detail::apply(*n.expr, in);
        } catch (const ExecutionError&) {
            throw;
        } catch (const Error& e) {
            throw ExecutionError(n.owner, e.code(), e.what());
        }
    }
    Bindings out;
    for (const auto& [name, idx] : plan.bindings)
        out.insert_or_assign(name, *results[idx]);
    return out;
}

/// parse + compile + execute, with the supplied inputs as the only leaves.
inline Bindings run_script(std::string_view text, const Bindings& inputs, bool share = true)
{
    CompileOptions opts;
    opts.inputs.emplace();
    for (const auto& [name, _] : inputs)
        opts.inputs->insert(name);
    opts.share = share;
    return execute(compile(parse(text), opts), inputs);
}

} // namespace socialscope::dsl
