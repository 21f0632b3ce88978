#pragma once

// Attributed social content graph: nodes and directed links carrying
// schema-less multi-valued attributes, plus condition satisfaction and the
// default keyword scorer.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "socialscope/error.hpp"

namespace socialscope {

using Scalar = std::variant<std::string, double>;

inline bool is_number(const Scalar& s) { return std::holds_alternative<double>(s); }
inline bool is_string(const Scalar& s) { return std::holds_alternative<std::string>(s); }

/// Shortest decimal text that parses back to the same double; integral
/// values print without a fractional part.
inline std::string format_number(double x)
{
    if (x == std::floor(x) && std::fabs(x) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", x);
        return buf;
    }
    char buf[40];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, x);
        if (std::strtod(buf, nullptr) == x)
            break;
    }
    return buf;
}

/// Fixed six-decimal rendering used for every printed score.
inline std::string format_score(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

inline std::string scalar_to_string(const Scalar& s)
{
    if (const auto* str = std::get_if<std::string>(&s))
        return *str;
    return format_number(std::get<double>(s));
}

/// Non-empty, duplicate-free set of finite scalars.
class AttrValue {
public:
    AttrValue(std::string s) : values_{Scalar(std::move(s))} {}
    AttrValue(const char* s) : values_{Scalar(std::string(s))} {}
    AttrValue(double x) : values_{Scalar(x)} { check(); }
    AttrValue(int x) : AttrValue(static_cast<double>(x)) {}
    AttrValue(Scalar s) : values_{std::move(s)} { check(); }
    AttrValue(std::initializer_list<Scalar> values) : values_(values) { check(); }
    explicit AttrValue(std::set<Scalar> values) : values_(std::move(values)) { check(); }

    const std::set<Scalar>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool contains(const Scalar& s) const { return values_.count(s) != 0; }

    /// The value as one number, if it is exactly one numeric scalar.
    std::optional<double> single_number() const
    {
        if (values_.size() != 1 || !is_number(*values_.begin()))
            return std::nullopt;
        return std::get<double>(*values_.begin());
    }

    void merge(const AttrValue& other) { values_.insert(other.values_.begin(), other.values_.end()); }

    friend bool operator==(const AttrValue&, const AttrValue&) = default;

private:
    void check() const
    {
        if (values_.empty())
            fail(ErrorCode::InvalidValue, "attribute value set must be non-empty");
        for (const auto& v : values_)
            if (is_number(v) && !std::isfinite(std::get<double>(v)))
                fail(ErrorCode::InvalidValue, "attribute values must be finite");
    }

    std::set<Scalar> values_;
};

using Attrs = std::map<std::string, AttrValue>;

struct Node {
    std::string id;
    Attrs attrs;

    friend bool operator==(const Node&, const Node&) = default;
};

struct Link {
    std::string id;
    std::string src;
    std::string tgt;
    Attrs attrs;

    friend bool operator==(const Link&, const Link&) = default;
};

inline constexpr std::string_view kTypeAttr = "type";
inline constexpr std::string_view kScoreAttr = "score";

inline bool has_type(const Attrs& attrs, std::string_view type)
{
    auto it = attrs.find(std::string(kTypeAttr));
    return it != attrs.end() && it->second.contains(Scalar(std::string(type)));
}

/// Element attribute lookup, including the pseudo-attributes `id` (nodes and
/// links) and `src`/`tgt` (links).
inline std::optional<AttrValue> lookup_attr(const Node& n, std::string_view name)
{
    if (name == "id")
        return AttrValue(n.id);
    auto it = n.attrs.find(std::string(name));
    if (it == n.attrs.end())
        return std::nullopt;
    return it->second;
}

inline std::optional<AttrValue> lookup_attr(const Link& l, std::string_view name)
{
    if (name == "id")
        return AttrValue(l.id);
    if (name == "src")
        return AttrValue(l.src);
    if (name == "tgt")
        return AttrValue(l.tgt);
    auto it = l.attrs.find(std::string(name));
    if (it == l.attrs.end())
        return std::nullopt;
    return it->second;
}

inline bool is_reserved_link_attr(std::string_view name)
{
    return name == "id" || name == "src" || name == "tgt";
}

/// Per-attribute value-set union; the reserved `score` attribute keeps the
/// maximum when both sides are numeric.
inline void consolidate_attrs(Attrs& into, const Attrs& from)
{
    for (const auto& [name, value] : from) {
        auto it = into.find(name);
        if (it == into.end()) {
            into.emplace(name, value);
            continue;
        }
        if (name == kScoreAttr) {
            auto a = it->second.single_number();
            auto b = value.single_number();
            if (a && b) {
                it->second = AttrValue(std::max(*a, *b));
                continue;
            }
        }
        it->second.merge(value);
    }
}

class GraphBuilder;

/// Immutable, well-formed social content graph. Elements are keyed by id and
/// iterate in id order.
class Graph {
public:
    Graph() = default;

    /// Validating constructor: rejects duplicate ids (across both id spaces),
    /// dangling link endpoints and elements without a `type`.
    static Graph build(std::vector<Node> nodes, std::vector<Link> links);

    const std::map<std::string, Node>& nodes() const noexcept { return nodes_; }
    const std::map<std::string, Link>& links() const noexcept { return links_; }

    const Node* find_node(const std::string& id) const
    {
        auto it = nodes_.find(id);
        return it == nodes_.end() ? nullptr : &it->second;
    }
    const Link* find_link(const std::string& id) const
    {
        auto it = links_.find(id);
        return it == links_.end() ? nullptr : &it->second;
    }
    bool has_node(const std::string& id) const { return nodes_.count(id) != 0; }
    bool has_link(const std::string& id) const { return links_.count(id) != 0; }

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t link_count() const noexcept { return links_.size(); }
    bool empty() const noexcept { return nodes_.empty() && links_.empty(); }
    bool is_null_graph() const noexcept { return links_.empty(); }

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    friend class GraphBuilder;

    std::map<std::string, Node> nodes_;
    std::map<std::string, Link> links_;
};

/// Accumulates elements for an operator result; finish() re-validates so
/// every operator output is well-formed.
class GraphBuilder {
public:
    /// Inserts the node unless one with the same id is present.
    void add_node(const Node& n) { graph_.nodes_.try_emplace(n.id, n); }

    /// Inserts or consolidates attributes into an existing node.
    void merge_node(const Node& n)
    {
        auto [it, inserted] = graph_.nodes_.try_emplace(n.id, n);
        if (!inserted)
            consolidate_attrs(it->second.attrs, n.attrs);
    }

    void put_node(Node n) { graph_.nodes_.insert_or_assign(n.id, std::move(n)); }

    void add_link(const Link& l) { graph_.links_.try_emplace(l.id, l); }

    void merge_link(const Link& l)
    {
        auto [it, inserted] = graph_.links_.try_emplace(l.id, l);
        if (!inserted)
            consolidate_attrs(it->second.attrs, l.attrs);
    }

    /// Inserts a freshly minted link; a clash with an existing id is an error.
    void add_new_link(Link l)
    {
        std::string id = l.id;
        if (!graph_.links_.emplace(id, std::move(l)).second)
            fail(ErrorCode::DuplicateId, id);
    }

    bool has_node(const std::string& id) const { return graph_.has_node(id); }

    Graph finish() &&
    {
        validate(graph_);
        return std::move(graph_);
    }

    static void validate(const Graph& g)
    {
        for (const auto& [id, n] : g.nodes_)
            if (!n.attrs.count(std::string(kTypeAttr)))
                fail(ErrorCode::MissingType, id);
        for (const auto& [id, l] : g.links_) {
            if (g.nodes_.count(id))
                fail(ErrorCode::DuplicateId, id);
            if (!l.attrs.count(std::string(kTypeAttr)))
                fail(ErrorCode::MissingType, id);
            if (!g.nodes_.count(l.src))
                fail(ErrorCode::DanglingEndpoint, id + " -> " + l.src);
            if (!g.nodes_.count(l.tgt))
                fail(ErrorCode::DanglingEndpoint, id + " -> " + l.tgt);
        }
    }

private:
    Graph graph_;
};

inline Graph Graph::build(std::vector<Node> nodes, std::vector<Link> links)
{
    Graph g;
    for (auto& n : nodes) {
        std::string id = n.id;
        if (!g.nodes_.emplace(id, std::move(n)).second)
            fail(ErrorCode::DuplicateId, id);
    }
    for (auto& l : links) {
        std::string id = l.id;
        if (g.nodes_.count(id) || !g.links_.emplace(id, std::move(l)).second)
            fail(ErrorCode::DuplicateId, id);
    }
    GraphBuilder::validate(g);
    return g;
}

inline Graph build_graph(std::vector<Node> nodes, std::vector<Link> links)
{
    return Graph::build(std::move(nodes), std::move(links));
}

// ---------------------------------------------------------------------------
// Conditions

enum class CompareOp { ContainsAll, Eq, Ne, Lt, Le, Gt, Ge };

inline std::string_view compare_op_symbol(CompareOp op)
{
    switch (op) {
    case CompareOp::ContainsAll: return "has";
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
    }
    return "?";
}

struct StructPredicate {
    std::string attr;
    CompareOp op = CompareOp::Eq;
    std::vector<Scalar> operands;

    void validate() const
    {
        if (attr.empty())
            fail(ErrorCode::InvalidArgument, "predicate attribute name is empty");
        if (op == CompareOp::ContainsAll ? operands.empty() : operands.size() != 1)
            fail(ErrorCode::InvalidArgument, "wrong operand count for predicate on '" + attr + "'");
        for (const auto& s : operands)
            if (is_number(s) && !std::isfinite(std::get<double>(s)))
                fail(ErrorCode::InvalidValue, "non-finite predicate operand");
    }

    friend bool operator==(const StructPredicate&, const StructPredicate&) = default;
};

inline StructPredicate has(std::string attr, std::vector<Scalar> values)
{
    StructPredicate p{std::move(attr), CompareOp::ContainsAll, std::move(values)};
    p.validate();
    return p;
}

inline StructPredicate cmp(std::string attr, CompareOp op, Scalar value)
{
    StructPredicate p{std::move(attr), op, {std::move(value)}};
    p.validate();
    return p;
}

/// Lowercased tokens of a string, split on ASCII non-alphanumerics. Bytes
/// outside ASCII are kept inside tokens so UTF-8 words stay whole.
inline std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (c >= 0x80 || std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty())
        tokens.push_back(std::move(current));
    return tokens;
}

/// Conjunction of structural predicates plus a keyword list. The empty
/// condition is satisfied by everything.
struct Condition {
    std::vector<StructPredicate> preds;
    std::vector<std::string> keywords;

    Condition() = default;
    Condition(std::vector<StructPredicate> p, std::vector<std::string> kw = {})
        : preds(std::move(p))
    {
        for (const auto& k : kw)
            for (auto& t : tokenize(k))
                keywords.push_back(std::move(t));
    }

    bool empty() const noexcept { return preds.empty() && keywords.empty(); }

    Condition structural_only() const
    {
        Condition c;
        c.preds = preds;
        return c;
    }

    friend bool operator==(const Condition&, const Condition&) = default;
};

enum class Direction { Src, Tgt };

inline Direction opposite(Direction d) { return d == Direction::Src ? Direction::Tgt : Direction::Src; }
inline std::string_view direction_name(Direction d) { return d == Direction::Src ? "src" : "tgt"; }

inline const std::string& endpoint(const Link& l, Direction d) { return d == Direction::Src ? l.src : l.tgt; }

struct DirectionalCondition {
    Direction d1 = Direction::Src;
    Direction d2 = Direction::Src;

    friend bool operator==(const DirectionalCondition&, const DirectionalCondition&) = default;
};

namespace detail {

template<typename T>
bool compare_values(const T& a, const T& b, CompareOp op)
{
    switch (op) {
    case CompareOp::Eq: return a == b;
    case CompareOp::Ne: return a != b;
    case CompareOp::Lt: return a < b;
    case CompareOp::Le: return a <= b;
    case CompareOp::Gt: return a > b;
    case CompareOp::Ge: return a >= b;
    case CompareOp::ContainsAll: break;
    }
    return false;
}

inline bool compare_scalar(const Scalar& value, const Scalar& operand, CompareOp op)
{
    if (value.index() != operand.index())
        return false;
    if (is_number(value))
        return compare_values(std::get<double>(value), std::get<double>(operand), op);
    return compare_values(std::get<std::string>(value), std::get<std::string>(operand), op);
}

inline void collect_tokens(const Attrs& attrs, std::set<std::string>& out)
{
    for (const auto& [name, value] : attrs)
        for (const auto& v : value.values())
            if (const auto* s = std::get_if<std::string>(&v))
                for (auto& t : tokenize(*s))
                    out.insert(std::move(t));
}

} // namespace detail

template<typename Element>
bool predicate_holds(const Element& e, const StructPredicate& p)
{
    auto value = lookup_attr(e, p.attr);
    if (!value)
        return false;
    if (p.op == CompareOp::ContainsAll) {
        return std::all_of(p.operands.begin(), p.operands.end(),
            [&](const Scalar& s) { return value->contains(s); });
    }
    const Scalar& operand = p.operands.front();
    return std::any_of(value->values().begin(), value->values().end(),
        [&](const Scalar& v) { return detail::compare_scalar(v, operand, p.op); });
}

inline std::set<std::string> keyword_tokens(const Attrs& attrs)
{
    std::set<std::string> tokens;
    detail::collect_tokens(attrs, tokens);
    return tokens;
}

/// Fraction of keywords equal to some token of the element's string values.
inline double default_keyword_score(const Attrs& attrs, std::span<const std::string> keywords)
{
    if (keywords.empty())
        fail(ErrorCode::EmptyKeywords, "keyword list is empty");
    auto tokens = keyword_tokens(attrs);
    std::size_t matched = 0;
    for (const auto& k : keywords) {
        std::string lowered;
        for (char ch : k)
            lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        matched += tokens.count(lowered);
    }
    return static_cast<double>(matched) / static_cast<double>(keywords.size());
}

template<typename Element>
double default_keyword_score(const Element& e, std::span<const std::string> keywords)
{
    return default_keyword_score(e.attrs, keywords);
}

template<typename Element>
bool satisfies(const Element& e, const Condition& c)
{
    for (const auto& p : c.preds)
        if (!predicate_holds(e, p))
            return false;
    if (c.keywords.empty())
        return true;
    auto tokens = keyword_tokens(e.attrs);
    return std::any_of(c.keywords.begin(), c.keywords.end(),
        [&](const std::string& k) { return tokens.count(k) != 0; });
}

/// Optional user scoring hook for selections: (element attrs, keywords) -> score.
using ScoringFn = std::function<double(const Attrs&, std::span<const std::string>)>;

// ---------------------------------------------------------------------------
// Canonical text (DSL surface syntax); also feeds deterministic id hashing.

inline std::string quote(std::string_view s)
{
    std::string out = "'";
    for (char ch : s) {
        if (ch == '\'' || ch == '\\')
            out.push_back('\\');
        out.push_back(ch);
    }
    out.push_back('\'');
    return out;
}

inline std::string scalar_literal(const Scalar& s)
{
    if (const auto* str = std::get_if<std::string>(&s))
        return quote(*str);
    return format_number(std::get<double>(s));
}

inline std::string to_text(const StructPredicate& p)
{
    if (p.op == CompareOp::ContainsAll) {
        std::string out = p.attr + " has {";
        for (std::size_t i = 0; i < p.operands.size(); ++i)
            out += (i ? ", " : "") + scalar_literal(p.operands[i]);
        return out + "}";
    }
    return p.attr + std::string(compare_op_symbol(p.op)) + scalar_literal(p.operands.front());
}

inline std::string to_text(const Condition& c)
{
    std::string out = "[";
    for (std::size_t i = 0; i < c.preds.size(); ++i)
        out += (i ? ", " : "") + to_text(c.preds[i]);
    if (!c.keywords.empty()) {
        std::string kw;
        for (std::size_t i = 0; i < c.keywords.size(); ++i)
            kw += (i ? " " : "") + c.keywords[i];
        out += "; kw:" + quote(kw);
    }
    return out + "]";
}

inline std::string to_text(const DirectionalCondition& d)
{
    return "(" + std::string(direction_name(d.d1)) + "," + std::string(direction_name(d.d2)) + ")";
}

/// 64-bit FNV-1a, rendered as 16 hex digits.
inline std::string stable_hash(std::string_view text)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace socialscope
