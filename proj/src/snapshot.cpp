#include "displace/snapshot.hpp"

#include <cstring>
#include <fstream>
#include <limits>

#include "displace/errors.hpp"
#include "displace/io_util.hpp"

namespace displace {

namespace {

// All multi-byte values are serialized little-endian regardless of host
// byte order so snapshots are bit-exact across platforms.

class ChecksumWriter {
public:
    explicit ChecksumWriter(std::ostream& out) : out_(out) {}

    void bytes(const void* data, std::size_t n) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
        hash_ = fnv1a64(data, n, hash_);
    }

    void u8(std::uint8_t v) { bytes(&v, 1); }

    void u32(std::uint32_t v) {
        std::uint8_t b[4] = {
            static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
            static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
        bytes(b, 4);
    }

    void u64(std::uint64_t v) {
        std::uint8_t b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
        bytes(b, 8);
    }

    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }

    void str(const std::string& s) {
        if (s.size() > std::numeric_limits<std::uint32_t>::max()) {
            throw Error("string too long for snapshot");
        }
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }

    std::uint64_t hash() const { return hash_; }

private:
    std::ostream& out_;
    std::uint64_t hash_ = 14695981039346656037ull;
};

class Cursor {
public:
    Cursor(const std::uint8_t* data, std::size_t n) : p_(data), end_(data + n) {}

    void bytes(void* out, std::size_t n) {
        if (static_cast<std::size_t>(end_ - p_) < n) {
            throw SnapshotIntegrityError("snapshot truncated");
        }
        std::memcpy(out, p_, n);
        p_ += n;
    }

    std::uint8_t u8() {
        std::uint8_t v;
        bytes(&v, 1);
        return v;
    }

    std::uint32_t u32() {
        std::uint8_t b[4];
        bytes(b, 4);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }

    std::uint64_t u64() {
        std::uint8_t b[8];
        bytes(b, 8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }

    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }

    std::string str() {
        std::uint32_t n = u32();
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }

    bool at_end() const { return p_ == end_; }

private:
    const std::uint8_t* p_;
    const std::uint8_t* end_;
};

void write_offsets(ChecksumWriter& w, const std::vector<std::uint64_t>& offsets) {
    for (auto v : offsets) w.u64(v);
}

std::vector<std::uint64_t> read_offsets(Cursor& c, std::size_t n_plus_1,
                                        std::uint64_t max_total) {
    std::vector<std::uint64_t> offsets(n_plus_1);
    for (auto& v : offsets) v = c.u64();
    for (std::size_t i = 0; i + 1 < offsets.size(); ++i) {
        if (offsets[i] > offsets[i + 1]) {
            throw SnapshotIntegrityError("snapshot offsets not monotone");
        }
    }
    if (offsets.empty() || offsets.front() != 0 || offsets.back() > max_total) {
        throw SnapshotIntegrityError("snapshot offsets out of range");
    }
    return offsets;
}

} // namespace

void save_snapshot(const CitationGraph& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open snapshot for writing: " + path);

    ChecksumWriter w(out);
    w.bytes(kSnapshotMagic, 4);
    w.u8(kSnapshotVersion);

    const std::uint64_t n = g.size();
    const std::uint64_t m = g.edge_count();
    w.u64(n);
    w.u64(m);
    w.u8(g.author_offsets_.empty() ? 0 : 1);

    for (const auto& id : g.external_ids_) w.str(id);
    for (auto y : g.years_) w.i32(y);
    for (auto t : g.doc_types_) w.u8(static_cast<std::uint8_t>(t));

    write_offsets(w, g.fields_.offsets);
    for (auto f : g.fields_.targets) w.u32(f);

    if (!g.author_offsets_.empty()) {
        write_offsets(w, g.author_offsets_);
        for (const auto& a : g.author_pool_) w.str(a);
    }

    write_offsets(w, g.out_.offsets);
    for (auto t : g.out_.targets) w.u32(t);
    write_offsets(w, g.in_.offsets);
    for (auto t : g.in_.targets) w.u32(t);

    const std::uint64_t checksum = w.hash();
    std::uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(checksum >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
    if (!out) throw Error("snapshot write failed: " + path);
}

CitationGraph load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open snapshot: " + path);
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());

    if (buf.size() < 5 || std::memcmp(buf.data(), kSnapshotMagic, 4) != 0) {
        throw SnapshotFormatError("incompatible snapshot: bad magic");
    }
    if (buf[4] != kSnapshotVersion) {
        throw SnapshotFormatError("incompatible snapshot: format version " +
                                  std::to_string(buf[4]) + ", expected " +
                                  std::to_string(kSnapshotVersion));
    }
    if (buf.size() < 5 + 8) {
        throw SnapshotIntegrityError("snapshot truncated");
    }

    const std::size_t payload = buf.size() - 8;
    std::uint64_t stored = 0;
    for (int i = 7; i >= 0; --i) stored = (stored << 8) | buf[payload + i];
    if (fnv1a64(buf.data(), payload) != stored) {
        throw SnapshotIntegrityError("snapshot checksum mismatch");
    }

    Cursor c(buf.data() + 5, payload - 5);
    const std::uint64_t n = c.u64();
    const std::uint64_t m = c.u64();
    const bool has_authors = c.u8() != 0;

    CitationGraph g;
    g.external_ids_.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        g.external_ids_.push_back(c.str());
        g.lookup_.emplace(g.external_ids_.back(), static_cast<PaperId>(i));
    }
    if (g.lookup_.size() != n) {
        throw SnapshotIntegrityError("snapshot id dictionary has duplicates");
    }
    g.years_.resize(n);
    for (auto& y : g.years_) y = c.i32();
    g.doc_types_.resize(n);
    for (auto& t : g.doc_types_) t = static_cast<DocType>(c.u8());

    g.fields_.offsets = read_offsets(c, n + 1, std::numeric_limits<std::uint64_t>::max());
    g.fields_.targets.resize(g.fields_.offsets.back());
    for (auto& f : g.fields_.targets) f = c.u32();

    if (has_authors) {
        g.author_offsets_ = read_offsets(c, n + 1, std::numeric_limits<std::uint64_t>::max());
        g.author_pool_.reserve(g.author_offsets_.back());
        for (std::uint64_t i = 0; i < g.author_offsets_.back(); ++i) {
            g.author_pool_.push_back(c.str());
        }
    }

    auto read_csr = [&](auto& csr) {
        csr.offsets = read_offsets(c, n + 1, m);
        if (csr.offsets.back() != m) {
            throw SnapshotIntegrityError("snapshot edge count mismatch");
        }
        csr.targets.resize(m);
        for (auto& t : csr.targets) {
            t = c.u32();
            if (t >= n) throw SnapshotIntegrityError("snapshot edge target out of range");
        }
    };
    read_csr(g.out_);
    read_csr(g.in_);

    if (!c.at_end()) throw SnapshotIntegrityError("snapshot has trailing payload");
    return g;
}

} // namespace displace
