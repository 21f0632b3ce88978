#pragma once

// Set aggregates, numerical aggregates, and composition functions.
//
// Aggregates run over a RowSet: a collection of equal-width link tuples.
// Plain link collections have width 1; graph-pattern chains have one link
// per pattern step; a composition pair is a single row of width 2.

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "socialscope/graph.hpp"

namespace socialscope {

class RowSet {
public:
    explicit RowSet(std::size_t width = 1) : width_(width)
    {
        if (width_ == 0)
            fail(ErrorCode::InvalidArgument, "row width must be positive");
    }

    static RowSet of_links(std::span<const Link* const> links)
    {
        RowSet rows(1);
        rows.flat_.assign(links.begin(), links.end());
        return rows;
    }

    static RowSet of_links(const std::vector<Link>& links)
    {
        RowSet rows(1);
        for (const auto& l : links)
            rows.flat_.push_back(&l);
        return rows;
    }

    void push_row(std::span<const Link* const> row)
    {
        if (row.size() != width_)
            fail(ErrorCode::InvalidArgument, "row width mismatch");
        flat_.insert(flat_.end(), row.begin(), row.end());
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t size() const noexcept { return flat_.size() / width_; }
    bool empty() const noexcept { return flat_.empty(); }

    std::span<const Link* const> row(std::size_t i) const
    {
        return std::span<const Link* const>(flat_).subspan(i * width_, width_);
    }

private:
    std::size_t width_;
    std::vector<const Link*> flat_;
};

namespace detail {

inline const Link& at_position(std::span<const Link* const> row, std::optional<std::size_t> pos)
{
    std::size_t p = pos.value_or(0);
    if (p >= row.size())
        fail(ErrorCode::AggEvalError,
            "position @" + std::to_string(p) + " out of range for width " + std::to_string(row.size()));
    return *row[p];
}

inline std::string position_suffix(std::optional<std::size_t> pos)
{
    return pos ? "@" + std::to_string(*pos) : std::string();
}

} // namespace detail

// ---------------------------------------------------------------------------
// Jaccard kernel

/// |a ∩ b| / |a ∪ b|, and 0 when both are empty.
template<typename Set>
double jaccard(const Set& a, const Set& b)
{
    if (a.empty() && b.empty())
        return 0.0;
    const Set& small = a.size() <= b.size() ? a : b;
    const Set& large = a.size() <= b.size() ? b : a;
    std::size_t common = 0;
    for (const auto& x : small)
        common += large.count(x) ? 1 : 0;
    std::size_t united = a.size() + b.size() - common;
    return static_cast<double>(common) / static_cast<double>(united);
}

// ---------------------------------------------------------------------------
// Set aggregates

struct SafExpr {
    std::string attr;
    std::optional<std::size_t> position;

    friend bool operator==(const SafExpr&, const SafExpr&) = default;
};

/// Union of the value sets of `attr` (pseudo-attributes included) over the
/// rows possessing it.
inline std::set<Scalar> eval_saf(const SafExpr& e, const RowSet& rows)
{
    if (e.attr.empty())
        fail(ErrorCode::InvalidArgument, "set aggregate needs an attribute");
    std::set<Scalar> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Link& l = detail::at_position(rows.row(i), e.position);
        if (auto v = lookup_attr(l, e.attr))
            out.insert(v->values().begin(), v->values().end());
    }
    return out;
}

inline std::set<Scalar> eval_saf(const SafExpr& e, const std::vector<Link>& links)
{
    return eval_saf(e, RowSet::of_links(links));
}

// ---------------------------------------------------------------------------
// Numerical aggregates

enum class ArithOp { Add, Sub, Mul, Div };
enum class BuiltinFn { Count, Sum, Avg, Min, Max };

inline std::string_view builtin_name(BuiltinFn fn)
{
    switch (fn) {
    case BuiltinFn::Count: return "count";
    case BuiltinFn::Sum: return "sum";
    case BuiltinFn::Avg: return "avg";
    case BuiltinFn::Min: return "min";
    case BuiltinFn::Max: return "max";
    }
    return "?";
}

struct NafOptions {
    /// Maximum nesting of sum-over/prod-over.
    int max_depth = 3;
};

/// Expression tree closed under the arithmetic operators, the constants 0
/// and 1, and summation/product over a collection.
///
/// Scopes: the top level sees the whole row collection; the body of a
/// collection-level sum/prod sees one row; a sum/prod inside a row iterates
/// the numeric values of a set-valued attribute of that row, binding `$x` to
/// the innermost value.
class NafExpr {
public:
    enum class Kind { Const0, Const1, AttrRef, BoundValue, Arith, SumOver, ProdOver, Builtin };

    static NafExpr zero() { return NafExpr(make(Kind::Const0)); }
    static NafExpr one() { return NafExpr(make(Kind::Const1)); }
    static NafExpr bound_value() { return NafExpr(make(Kind::BoundValue)); }

    static NafExpr attr(std::string name, std::optional<std::size_t> pos = std::nullopt)
    {
        auto n = make(Kind::AttrRef);
        n->attr = std::move(name);
        n->position = pos;
        return NafExpr(std::move(n));
    }

    static NafExpr arith(ArithOp op, NafExpr lhs, NafExpr rhs)
    {
        auto n = make(Kind::Arith);
        n->op = op;
        n->children = {std::move(lhs.node_), std::move(rhs.node_)};
        return NafExpr(std::move(n));
    }

    /// At collection level iterates rows; at row level iterates the values of
    /// `over` (required there).
    static NafExpr sum_over(NafExpr body, std::string over = {}, std::optional<std::size_t> pos = std::nullopt)
    {
        return fold(Kind::SumOver, std::move(body), std::move(over), pos);
    }

    static NafExpr prod_over(NafExpr body, std::string over = {}, std::optional<std::size_t> pos = std::nullopt)
    {
        return fold(Kind::ProdOver, std::move(body), std::move(over), pos);
    }

    static NafExpr builtin(BuiltinFn fn, std::string name = {}, std::optional<std::size_t> pos = std::nullopt)
    {
        auto n = make(Kind::Builtin);
        n->fn = fn;
        n->attr = std::move(name);
        n->position = pos;
        if (fn != BuiltinFn::Count && n->attr.empty())
            fail(ErrorCode::InvalidArgument, std::string(builtin_name(fn)) + " needs an attribute");
        return NafExpr(std::move(n));
    }

    static NafExpr count() { return builtin(BuiltinFn::Count); }
    static NafExpr sum(std::string a, std::optional<std::size_t> p = {}) { return builtin(BuiltinFn::Sum, std::move(a), p); }
    static NafExpr avg(std::string a, std::optional<std::size_t> p = {}) { return builtin(BuiltinFn::Avg, std::move(a), p); }
    static NafExpr min(std::string a, std::optional<std::size_t> p = {}) { return builtin(BuiltinFn::Min, std::move(a), p); }
    static NafExpr max(std::string a, std::optional<std::size_t> p = {}) { return builtin(BuiltinFn::Max, std::move(a), p); }

    friend NafExpr operator+(NafExpr a, NafExpr b) { return arith(ArithOp::Add, std::move(a), std::move(b)); }
    friend NafExpr operator-(NafExpr a, NafExpr b) { return arith(ArithOp::Sub, std::move(a), std::move(b)); }
    friend NafExpr operator*(NafExpr a, NafExpr b) { return arith(ArithOp::Mul, std::move(a), std::move(b)); }
    friend NafExpr operator/(NafExpr a, NafExpr b) { return arith(ArithOp::Div, std::move(a), std::move(b)); }

    Kind kind() const { return node_->kind; }
    const std::string& attr_name() const { return node_->attr; }
    std::optional<std::size_t> position() const { return node_->position; }
    ArithOp arith_op() const { return node_->op; }
    BuiltinFn builtin_fn() const { return node_->fn; }
    NafExpr child(std::size_t i) const { return NafExpr(node_->children.at(i)); }

    /// Canonical surface text.
    std::string text() const;

    friend bool operator==(const NafExpr& a, const NafExpr& b) { return a.text() == b.text(); }

private:
    struct NodeData {
        Kind kind;
        std::string attr;
        std::optional<std::size_t> position;
        ArithOp op = ArithOp::Add;
        BuiltinFn fn = BuiltinFn::Count;
        std::vector<std::shared_ptr<const NodeData>> children;
    };

    explicit NafExpr(std::shared_ptr<const NodeData> n) : node_(std::move(n)) {}

    static std::shared_ptr<NodeData> make(Kind k)
    {
        auto n = std::make_shared<NodeData>();
        n->kind = k;
        return n;
    }

    static NafExpr fold(Kind k, NafExpr body, std::string over, std::optional<std::size_t> pos)
    {
        auto n = make(k);
        n->attr = std::move(over);
        n->position = pos;
        n->children = {std::move(body.node_)};
        return NafExpr(std::move(n));
    }

    std::shared_ptr<const NodeData> node_;
};

inline std::string NafExpr::text() const
{
    switch (kind()) {
    case Kind::Const0: return "0";
    case Kind::Const1: return "1";
    case Kind::BoundValue: return "$x";
    case Kind::AttrRef: return attr_name() + detail::position_suffix(position());
    case Kind::Arith: {
        static constexpr const char* symbols[] = {" + ", " - ", " * ", " / "};
        return "(" + child(0).text() + symbols[static_cast<int>(arith_op())] + child(1).text() + ")";
    }
    case Kind::SumOver:
    case Kind::ProdOver: {
        std::string out = kind() == Kind::SumOver ? "sumover(" : "prodover(";
        out += child(0).text();
        if (!attr_name().empty())
            out += " over " + attr_name() + detail::position_suffix(position());
        return out + ")";
    }
    case Kind::Builtin:
        return std::string(builtin_name(builtin_fn())) + "("
            + (attr_name().empty() ? std::string() : attr_name() + detail::position_suffix(position())) + ")";
    }
    return "?";
}

namespace detail {

enum class NafScope { Collection, Row, Value };

inline double numeric_attr(const Link& l, const std::string& name)
{
    auto v = lookup_attr(l, name);
    auto x = v ? v->single_number() : std::nullopt;
    if (!x)
        fail(ErrorCode::AggEvalError, "link " + l.id + ": attribute '" + name + "' is missing or not a single number");
    return *x;
}

class NafEvaluator {
public:
    NafEvaluator(const RowSet& rows, const NafOptions& opts) : rows_(rows), opts_(opts) {}

    double collection(const NafExpr& e, int depth) { return eval(e, NafScope::Collection, {}, 0.0, depth); }

    double row(const NafExpr& e, std::span<const Link* const> r, int depth)
    {
        return eval(e, NafScope::Row, r, 0.0, depth);
    }

private:
    double eval(const NafExpr& e, NafScope scope, std::span<const Link* const> row, double bound, int depth)
    {
        using K = NafExpr::Kind;
        switch (e.kind()) {
        case K::Const0: return 0.0;
        case K::Const1: return 1.0;
        case K::BoundValue:
            if (scope != NafScope::Value)
                fail(ErrorCode::AggEvalError, "$x used outside a value iteration");
            return bound;
        case K::AttrRef:
            if (scope == NafScope::Collection)
                fail(ErrorCode::AggEvalError, "attribute '" + e.attr_name() + "' referenced outside sumover/prodover");
            return numeric_attr(at_position(row, e.position()), e.attr_name());
        case K::Arith: {
            double a = eval(e.child(0), scope, row, bound, depth);
            double b = eval(e.child(1), scope, row, bound, depth);
            switch (e.arith_op()) {
            case ArithOp::Add: return a + b;
            case ArithOp::Sub: return a - b;
            case ArithOp::Mul: return a * b;
            case ArithOp::Div:
                if (b == 0.0)
                    fail(ErrorCode::DivideByZero, e.text());
                return a / b;
            }
            return 0.0;
        }
        case K::SumOver:
        case K::ProdOver: return fold(e, scope, row, depth);
        case K::Builtin:
            if (scope != NafScope::Collection)
                fail(ErrorCode::AggEvalError, e.text() + " needs a collection in scope");
            return builtin(e);
        }
        return 0.0;
    }

    double fold(const NafExpr& e, NafScope scope, std::span<const Link* const> row, int depth)
    {
        if (depth + 1 > opts_.max_depth)
            fail(ErrorCode::AggEvalError, "sumover/prodover nesting exceeds " + std::to_string(opts_.max_depth));
        bool sum = e.kind() == NafExpr::Kind::SumOver;
        double acc = sum ? 0.0 : 1.0;
        if (scope == NafScope::Collection) {
            if (!e.attr_name().empty())
                fail(ErrorCode::AggEvalError, "collection-level " + e.text() + " takes no 'over' attribute");
            for (std::size_t i = 0; i < rows_.size(); ++i) {
                double v = eval(e.child(0), NafScope::Row, rows_.row(i), 0.0, depth + 1);
                acc = sum ? acc + v : acc * v;
            }
            return acc;
        }
        if (e.attr_name().empty())
            fail(ErrorCode::AggEvalError, e.text() + " has no collection in scope");
        const Link& l = at_position(row, e.position());
        auto values = lookup_attr(l, e.attr_name());
        if (values) {
            for (const auto& s : values->values()) {
                if (!is_number(s))
                    fail(ErrorCode::AggEvalError, "link " + l.id + ": '" + e.attr_name() + "' holds a non-number");
                double v = eval(e.child(0), NafScope::Value, row, std::get<double>(s), depth + 1);
                acc = sum ? acc + v : acc * v;
            }
        }
        return acc;
    }

    double builtin(const NafExpr& e)
    {
        std::size_t n = rows_.size();
        if (e.builtin_fn() == BuiltinFn::Count)
            return static_cast<double>(n);
        double sum = 0.0;
        std::optional<double> lo, hi;
        for (std::size_t i = 0; i < n; ++i) {
            double v = numeric_attr(at_position(rows_.row(i), e.position()), e.attr_name());
            sum += v;
            lo = lo ? std::min(*lo, v) : v;
            hi = hi ? std::max(*hi, v) : v;
        }
        switch (e.builtin_fn()) {
        case BuiltinFn::Sum: return sum;
        case BuiltinFn::Avg:
            if (n == 0)
                fail(ErrorCode::DivideByZero, "avg over an empty collection");
            return sum / static_cast<double>(n);
        case BuiltinFn::Min:
        case BuiltinFn::Max:
            if (n == 0)
                fail(ErrorCode::AggEvalError, e.text() + " over an empty collection");
            return e.builtin_fn() == BuiltinFn::Min ? *lo : *hi;
        case BuiltinFn::Count: break;
        }
        return 0.0;
    }

    const RowSet& rows_;
    const NafOptions& opts_;
};

inline double checked_finite(double v, const NafExpr& e)
{
    if (!std::isfinite(v))
        fail(ErrorCode::AggEvalError, "non-finite result of " + e.text());
    return v;
}

} // namespace detail

inline double eval_naf(const NafExpr& e, const RowSet& rows, const NafOptions& opts = {})
{
    detail::NafEvaluator ev(rows, opts);
    return detail::checked_finite(ev.collection(e, 0), e);
}

inline double eval_naf(const NafExpr& e, const std::vector<Link>& links, const NafOptions& opts = {})
{
    return eval_naf(e, RowSet::of_links(links), opts);
}

/// Evaluates an expression against one row (no collection in scope).
inline double eval_naf_row(const NafExpr& e, std::span<const Link* const> row, const NafOptions& opts = {})
{
    RowSet none(row.size());
    detail::NafEvaluator ev(none, opts);
    return detail::checked_finite(ev.row(e, row, 0), e);
}

// ---------------------------------------------------------------------------
// Aggregate specs

struct ConstString {
    std::string value;
    friend bool operator==(const ConstString&, const ConstString&) = default;
};

/// Copies the attribute's value, which must agree across every row having it.
struct CopyAny {
    std::string attr;
    std::optional<std::size_t> position;
    friend bool operator==(const CopyAny&, const CopyAny&) = default;
};

using AggSpec = std::variant<SafExpr, NafExpr, ConstString, CopyAny>;

inline std::string to_text(const AggSpec& spec)
{
    struct Printer {
        std::string operator()(const SafExpr& e) const { return "saf(" + e.attr + detail::position_suffix(e.position) + ")"; }
        std::string operator()(const NafExpr& e) const { return e.text(); }
        std::string operator()(const ConstString& c) const { return quote(c.value); }
        std::string operator()(const CopyAny& c) const { return "any(" + c.attr + detail::position_suffix(c.position) + ")"; }
    };
    return std::visit(Printer{}, spec);
}

/// Evaluates an aggregate; nullopt when a set aggregate yields the empty set
/// (attribute values must be non-empty, so nothing is assigned).
inline std::optional<AttrValue> eval_agg(const AggSpec& spec, const RowSet& rows, const NafOptions& opts = {})
{
    if (const auto* saf = std::get_if<SafExpr>(&spec)) {
        auto values = eval_saf(*saf, rows);
        if (values.empty())
            return std::nullopt;
        return AttrValue(std::move(values));
    }
    if (const auto* naf = std::get_if<NafExpr>(&spec))
        return AttrValue(eval_naf(*naf, rows, opts));
    if (const auto* c = std::get_if<ConstString>(&spec))
        return AttrValue(c->value);
    const auto& copy = std::get<CopyAny>(spec);
    std::optional<AttrValue> found;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Link& l = detail::at_position(rows.row(i), copy.position);
        auto v = lookup_attr(l, copy.attr);
        if (!v)
            continue;
        if (found && !(*found == *v))
            fail(ErrorCode::AggEvalError, "any(" + copy.attr + "): values disagree across the group (link " + l.id + ")");
        found = std::move(v);
    }
    if (!found)
        fail(ErrorCode::AggEvalError, "any(" + copy.attr + "): no row carries the attribute");
    return found;
}

struct NamedAgg {
    std::string attr;
    AggSpec spec;
};

// ---------------------------------------------------------------------------
// Composition functions

enum class Side { LeftLink, RightLink, LeftSrc, LeftTgt, RightSrc, RightTgt };

inline std::string_view side_name(Side s)
{
    switch (s) {
    case Side::LeftLink: return "left";
    case Side::RightLink: return "right";
    case Side::LeftSrc: return "left.src";
    case Side::LeftTgt: return "left.tgt";
    case Side::RightSrc: return "right.src";
    case Side::RightTgt: return "right.tgt";
    }
    return "?";
}

struct CopyFrom {
    Side side;
    std::string attr;
    friend bool operator==(const CopyFrom&, const CopyFrom&) = default;
};

struct JaccardOf {
    Side left_side;
    std::string left_attr;
    Side right_side;
    std::string right_attr;
    friend bool operator==(const JaccardOf&, const JaccardOf&) = default;
};

/// NAF/SAF outputs see the pair as one row: position 0 is the left link,
/// position 1 the right link.
using CfOutput = std::variant<NafExpr, SafExpr, ConstString, CopyFrom, JaccardOf>;

inline std::string to_text(const CfOutput& out)
{
    struct Printer {
        std::string operator()(const NafExpr& e) const { return e.text(); }
        std::string operator()(const SafExpr& e) const { return "saf(" + e.attr + detail::position_suffix(e.position) + ")"; }
        std::string operator()(const ConstString& c) const { return quote(c.value); }
        std::string operator()(const CopyFrom& c) const { return "copy(" + std::string(side_name(c.side)) + "." + c.attr + ")"; }
        std::string operator()(const JaccardOf& j) const
        {
            return "jaccard(" + std::string(side_name(j.left_side)) + "." + j.left_attr + ", "
                + std::string(side_name(j.right_side)) + "." + j.right_attr + ")";
        }
    };
    return std::visit(Printer{}, out);
}

inline constexpr std::string_view kDefaultComposedType = "compose";

struct CompositionFn {
    std::map<std::string, CfOutput> outputs;

    void validate() const
    {
        if (outputs.empty())
            fail(ErrorCode::CompositionFnError, "composition function declares no outputs");
        for (const auto& [name, _] : outputs)
            if (name.empty() || is_reserved_link_attr(name))
                fail(ErrorCode::CompositionFnError, "composition function may not write '" + name + "'");
    }

    std::string text() const
    {
        std::string out = "{";
        bool first = true;
        for (const auto& [name, o] : outputs) {
            out += (first ? "" : ", ") + name + " := " + to_text(o);
            first = false;
        }
        return out + "}";
    }

    friend bool operator==(const CompositionFn& a, const CompositionFn& b) { return a.text() == b.text(); }
};

/// A link with its two endpoint nodes, as seen by a composition function.
struct LinkContext {
    const Link& link;
    const Node& src;
    const Node& tgt;
};

namespace detail {

inline std::optional<AttrValue> side_attr(Side s, const std::string& name, const LinkContext& l, const LinkContext& r)
{
    switch (s) {
    case Side::LeftLink: return lookup_attr(l.link, name);
    case Side::RightLink: return lookup_attr(r.link, name);
    case Side::LeftSrc: return lookup_attr(l.src, name);
    case Side::LeftTgt: return lookup_attr(l.tgt, name);
    case Side::RightSrc: return lookup_attr(r.src, name);
    case Side::RightTgt: return lookup_attr(r.tgt, name);
    }
    return std::nullopt;
}

} // namespace detail

/// Evaluates every declared output for the pair (left, right).
inline Attrs apply_composition(const CompositionFn& f, const LinkContext& left, const LinkContext& right,
    const NafOptions& opts = {})
{
    f.validate();
    const Link* pair[2] = {&left.link, &right.link};
    std::span<const Link* const> row(pair, 2);
    Attrs out;
    for (const auto& [name, output] : f.outputs) {
        try {
            if (const auto* naf = std::get_if<NafExpr>(&output)) {
                out.insert_or_assign(name, AttrValue(eval_naf_row(*naf, row, opts)));
            } else if (const auto* saf = std::get_if<SafExpr>(&output)) {
                RowSet rows(2);
                rows.push_row(row);
                auto values = eval_saf(*saf, rows);
                if (!values.empty())
                    out.insert_or_assign(name, AttrValue(std::move(values)));
            } else if (const auto* c = std::get_if<ConstString>(&output)) {
                out.insert_or_assign(name, AttrValue(c->value));
            } else if (const auto* copy = std::get_if<CopyFrom>(&output)) {
                auto v = detail::side_attr(copy->side, copy->attr, left, right);
                if (!v)
                    fail(ErrorCode::CompositionFnError,
                        "copy(" + std::string(side_name(copy->side)) + "." + copy->attr + "): attribute missing");
                out.insert_or_assign(name, std::move(*v));
            } else {
                const auto& j = std::get<JaccardOf>(output);
                auto a = detail::side_attr(j.left_side, j.left_attr, left, right);
                auto b = detail::side_attr(j.right_side, j.right_attr, left, right);
                std::set<Scalar> empty;
                out.insert_or_assign(name, AttrValue(jaccard(a ? a->values() : empty, b ? b->values() : empty)));
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::CompositionFnError)
                throw;
            fail(ErrorCode::CompositionFnError, "output '" + name + "': " + e.what());
        }
    }
    if (out.empty())
        fail(ErrorCode::CompositionFnError, "composition produced no attributes");
    return out;
}

} // namespace socialscope
