#pragma once

// Binary snapshot of a clustered index. All integers little-endian; strings
// are a u32 byte length followed by the bytes. See docs/index-format.md.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "socialscope/error.hpp"
#include "socialscope/social_index.hpp"

namespace socialscope {

inline constexpr char kSnapshotMagic[8] = {'S', 'S', 'C', 'P', 'I', 'D', 'X', '\0'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

namespace detail {

class SnapshotWriter {
public:
    explicit SnapshotWriter(std::ostream& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
    void u32(std::uint32_t v) { le(v, 4); }
    void u64(std::uint64_t v) { le(v, 8); }
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    void count(std::size_t n)
    {
        if (n > UINT32_MAX)
            fail(ErrorCode::SnapshotError, "section too large");
        u32(static_cast<std::uint32_t>(n));
    }

    void str(const std::string& s)
    {
        count(s.size());
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }

    void strings(const IdSet& s)
    {
        count(s.size());
        for (const auto& x : s)
            str(x);
    }

private:
    void le(std::uint64_t v, int bytes)
    {
        for (int i = 0; i < bytes; ++i)
            out_.put(static_cast<char>((v >> (8 * i)) & 0xff));
    }

    std::ostream& out_;
};

class SnapshotReader {
public:
    explicit SnapshotReader(std::istream& in) : in_(in) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
    std::uint64_t u64() { return le(8); }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64() { return std::bit_cast<double>(u64()); }

    std::string str()
    {
        std::uint32_t n = u32();
        std::string s(n, '\0');
        if (n && !in_.read(s.data(), n))
            truncated();
        return s;
    }

    IdSet strings()
    {
        IdSet out;
        for (std::uint32_t i = 0, n = u32(); i < n; ++i)
            out.insert(str());
        return out;
    }

    void bytes(char* dst, std::size_t n)
    {
        if (!in_.read(dst, static_cast<std::streamsize>(n)))
            truncated();
    }

private:
    [[noreturn]] static void truncated() { fail(ErrorCode::SnapshotError, "truncated snapshot"); }

    std::uint64_t le(int bytes)
    {
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) {
            int c = in_.get();
            if (c == std::char_traits<char>::eof())
                truncated();
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
        }
        return v;
    }

    std::istream& in_;
};

} // namespace detail

inline void write_snapshot(const ClusteredIndex& idx, std::ostream& out)
{
    detail::SnapshotWriter w(out);
    out.write(kSnapshotMagic, sizeof kSnapshotMagic);
    w.u32(kSnapshotVersion);
    w.u8(static_cast<std::uint8_t>(idx.model.strategy.kind));
    w.f64(idx.model.strategy.theta);

    w.strings(idx.sets.users);
    w.count(idx.model.assignment.size());
    for (const auto& [u, c] : idx.model.assignment) {
        w.str(u);
        w.u32(c);
    }
    w.count(idx.model.leaders.size());
    for (const auto& l : idx.model.leaders)
        w.str(l);

    for (const auto* m : {&idx.sets.network, &idx.sets.items}) {
        w.count(m->size());
        for (const auto& [u, s] : *m) {
            w.str(u);
            w.strings(s);
        }
    }
    w.count(idx.sets.taggers.size());
    for (const auto& [key, s] : idx.sets.taggers) {
        w.str(key.first);
        w.str(key.second);
        w.strings(s);
    }

    w.count(idx.lists.size());
    for (const auto& [key, list] : idx.lists) {
        w.str(key.first);
        w.u32(key.second);
        w.count(list.size());
        for (const auto& e : list) {
            w.str(e.item);
            w.i64(e.score);
        }
    }
    if (!out)
        fail(ErrorCode::IoError, "snapshot write failed");
}

inline ClusteredIndex read_snapshot(std::istream& in)
{
    detail::SnapshotReader r(in);
    char magic[8];
    r.bytes(magic, sizeof magic);
    if (std::memcmp(magic, kSnapshotMagic, sizeof magic) != 0)
        fail(ErrorCode::SnapshotError, "not an index snapshot");
    if (std::uint32_t v = r.u32(); v != kSnapshotVersion)
        fail(ErrorCode::SnapshotError, "unsupported snapshot version " + std::to_string(v));
    ClusteredIndex idx;
    std::uint8_t kind = r.u8();
    if (kind > static_cast<std::uint8_t>(ClusteringKind::Hybrid))
        fail(ErrorCode::SnapshotError, "unknown clustering strategy " + std::to_string(kind));
    idx.model.strategy = {static_cast<ClusteringKind>(kind), r.f64()};

    idx.sets.users = r.strings();
    for (std::uint32_t i = 0, n = r.u32(); i < n; ++i) {
        std::string u = r.str();
        idx.model.assignment.emplace(std::move(u), r.u32());
    }
    for (std::uint32_t i = 0, n = r.u32(); i < n; ++i)
        idx.model.leaders.push_back(r.str());
    for (const auto& [u, c] : idx.model.assignment)
        if (c >= idx.model.leaders.size())
            fail(ErrorCode::SnapshotError, "user " + u + " assigned to missing cluster");

    for (auto* m : {&idx.sets.network, &idx.sets.items}) {
        for (std::uint32_t i = 0, n = r.u32(); i < n; ++i) {
            std::string u = r.str();
            (*m)[u] = r.strings();
        }
    }
    for (std::uint32_t i = 0, n = r.u32(); i < n; ++i) {
        std::string item = r.str();
        std::string tag = r.str();
        idx.sets.taggers[{std::move(item), std::move(tag)}] = r.strings();
    }

    for (std::uint32_t i = 0, n = r.u32(); i < n; ++i) {
        std::string tag = r.str();
        ClusterId c = r.u32();
        auto& list = idx.lists[{std::move(tag), c}];
        for (std::uint32_t j = 0, m = r.u32(); j < m; ++j) {
            std::string item = r.str();
            list.push_back({std::move(item), r.i64()});
        }
    }
    if (in.peek() != std::char_traits<char>::eof())
        fail(ErrorCode::SnapshotError, "trailing bytes after snapshot");
    return idx;
}

inline void save_snapshot(const ClusteredIndex& idx, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorCode::IoError, "cannot write " + path);
    write_snapshot(idx, out);
}

inline ClusteredIndex load_snapshot(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::IoError, "cannot open " + path);
    return read_snapshot(in);
}

} // namespace socialscope
