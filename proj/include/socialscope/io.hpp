#pragma once

// JSON-lines graph files: one node file of {"id", "attrs"} records and one
// link file of {"id", "src", "tgt", "attrs"} records. Arrays are value sets;
// output is sorted by id so equal graphs produce identical bytes.

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "socialscope/error.hpp"
#include "socialscope/graph.hpp"

namespace socialscope {

using Json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& file, std::size_t line, const std::string& what)
{
    fail(ErrorCode::ParseError, file + ":" + std::to_string(line) + ": " + what);
}

inline Scalar scalar_from_json(const Json& j, const std::string& file, std::size_t line, const std::string& where)
{
    if (j.is_string())
        return j.get<std::string>();
    if (j.is_number()) {
        double x = j.get<double>();
        if (!std::isfinite(x))
            parse_fail(file, line, where + ": number out of range");
        return x;
    }
    parse_fail(file, line, where + ": expected a string or number");
}

inline std::string id_from_json(const Json& j, const std::string& file, std::size_t line, const char* field)
{
    if (j.is_string())
        return j.get<std::string>();
    if (j.is_number_integer())
        return std::to_string(j.get<long long>());
    if (j.is_number())
        return format_number(j.get<double>());
    parse_fail(file, line, std::string("field '") + field + "' must be a string or number");
}

inline Attrs attrs_from_json(const Json& j, const std::string& file, std::size_t line)
{
    if (!j.is_object())
        parse_fail(file, line, "field 'attrs' must be an object");
    Attrs out;
    for (const auto& [name, v] : j.items()) {
        std::string where = "attribute '" + name + "'";
        if (v.is_array()) {
            if (v.empty())
                parse_fail(file, line, where + ": value set must be non-empty");
            std::set<Scalar> values;
            for (const auto& x : v)
                values.insert(scalar_from_json(x, file, line, where));
            out.emplace(name, AttrValue(std::move(values)));
        } else {
            out.emplace(name, AttrValue(scalar_from_json(v, file, line, where)));
        }
    }
    return out;
}

template<typename F>
void for_each_record(std::istream& in, const std::string& file, F&& f)
{
    std::string text;
    for (std::size_t line = 1; std::getline(in, text); ++line) {
        if (text.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        Json j;
        try {
            j = Json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            parse_fail(file, line, e.what());
        }
        if (!j.is_object())
            parse_fail(file, line, "record must be a JSON object");
        if (!j.contains("id"))
            parse_fail(file, line, "missing field 'id'");
        f(j, line);
    }
}

} // namespace detail

inline Json scalar_to_json(const Scalar& s)
{
    if (const auto* str = std::get_if<std::string>(&s))
        return *str;
    return std::get<double>(s);
}

inline Json value_to_json(const AttrValue& v)
{
    if (v.size() == 1)
        return scalar_to_json(*v.values().begin());
    Json arr = Json::array();
    for (const auto& x : v.values())
        arr.push_back(scalar_to_json(x));
    return arr;
}

inline Json attrs_to_json(const Attrs& attrs)
{
    Json out = Json::object();
    for (const auto& [name, v] : attrs)
        out[name] = value_to_json(v);
    return out;
}

inline Json node_to_json(const Node& n) { return Json{{"id", n.id}, {"attrs", attrs_to_json(n.attrs)}}; }

inline Json link_to_json(const Link& l)
{
    return Json{{"id", l.id}, {"src", l.src}, {"tgt", l.tgt}, {"attrs", attrs_to_json(l.attrs)}};
}

inline Graph read_graph(std::istream& nodes, std::istream& links, const std::string& node_file = "nodes",
    const std::string& link_file = "links")
{
    std::vector<Node> ns;
    std::vector<Link> ls;
    detail::for_each_record(nodes, node_file, [&](const Json& j, std::size_t line) {
        Attrs a = j.contains("attrs") ? detail::attrs_from_json(j["attrs"], node_file, line) : Attrs{};
        ns.push_back(Node{detail::id_from_json(j["id"], node_file, line, "id"), std::move(a)});
    });
    detail::for_each_record(links, link_file, [&](const Json& j, std::size_t line) {
        for (const char* f : {"src", "tgt"})
            if (!j.contains(f))
                detail::parse_fail(link_file, line, std::string("missing field '") + f + "'");
        Attrs a = j.contains("attrs") ? detail::attrs_from_json(j["attrs"], link_file, line) : Attrs{};
        ls.push_back(Link{detail::id_from_json(j["id"], link_file, line, "id"),
            detail::id_from_json(j["src"], link_file, line, "src"), detail::id_from_json(j["tgt"], link_file, line, "tgt"),
            std::move(a)});
    });
    return build_graph(std::move(ns), std::move(ls));
}

inline void write_graph(const Graph& g, std::ostream& nodes, std::ostream& links)
{
    for (const auto& [id, n] : g.nodes())
        nodes << node_to_json(n).dump() << '\n';
    for (const auto& [id, l] : g.links())
        links << link_to_json(l).dump() << '\n';
}

inline Graph load_graph(const std::string& node_path, const std::string& link_path)
{
    std::ifstream nodes(node_path), links(link_path);
    if (!nodes)
        fail(ErrorCode::IoError, "cannot open " + node_path);
    if (!links)
        fail(ErrorCode::IoError, "cannot open " + link_path);
    return read_graph(nodes, links, node_path, link_path);
}

inline void save_graph(const Graph& g, const std::string& node_path, const std::string& link_path)
{
    std::ofstream nodes(node_path, std::ios::binary), links(link_path, std::ios::binary);
    if (!nodes)
        fail(ErrorCode::IoError, "cannot write " + node_path);
    if (!links)
        fail(ErrorCode::IoError, "cannot write " + link_path);
    write_graph(g, nodes, links);
    if (!nodes.flush() || !links.flush())
        fail(ErrorCode::IoError, "write failed for " + node_path + " or " + link_path);
}

} // namespace socialscope
