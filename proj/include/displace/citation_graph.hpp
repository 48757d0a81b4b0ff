#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "displace/types.hpp"

namespace displace {

/// Immutable bidirectional citation adjacency over dense integer ids.
///
/// Both directions are stored as CSR arrays with targets sorted ascending,
/// so membership tests are binary searches and iteration order is
/// deterministic. After build() there is no mutation path; the graph is
/// safely shared across threads.
class CitationGraph {
public:
    CitationGraph() = default;

    std::size_t size() const { return years_.size(); }
    std::size_t edge_count() const { return out_.targets.size(); }

    /// Papers cited by `p` (its references), ascending.
    std::span<const PaperId> references(PaperId p) const { return out_.row(p); }
    /// Papers citing `p`, ascending.
    std::span<const PaperId> citers(PaperId p) const { return in_.row(p); }

    /// True when `citing` lists `cited` among its references.
    bool cites(PaperId citing, PaperId cited) const;

    int year(PaperId p) const { return years_[p]; }
    DocType doc_type(PaperId p) const { return doc_types_[p]; }
    std::span<const std::uint32_t> fields(PaperId p) const { return fields_.row(p); }
    std::span<const std::string> authors(PaperId p) const;
    const std::string& external_id(PaperId p) const { return external_ids_[p]; }

    std::optional<PaperId> find(std::string_view external_id) const;

    /// True when any paper in the corpus carries author strings.
    bool has_author_data() const { return !author_pool_.empty(); }

private:
    template <typename T>
    struct Csr {
        std::vector<std::uint64_t> offsets; // size n+1
        std::vector<T> targets;

        std::span<const T> row(PaperId p) const {
            return {targets.data() + offsets[p],
                    targets.data() + offsets[p + 1]};
        }
    };

    std::vector<std::string> external_ids_;
    std::unordered_map<std::string, PaperId> lookup_;
    std::vector<std::int32_t> years_;
    std::vector<DocType> doc_types_;
    Csr<std::uint32_t> fields_;
    std::vector<std::uint64_t> author_offsets_; // size n+1 (or empty when no authors)
    std::vector<std::string> author_pool_;
    Csr<PaperId> out_;
    Csr<PaperId> in_;

    friend class GraphBuilder;
    friend void save_snapshot(const CitationGraph&, const std::string&);
    friend CitationGraph load_snapshot(const std::string&);
};

/// Single-writer construction phase for CitationGraph. Records are appended,
/// edges refer to internal ids, and build() finalizes the CSR arrays.
class GraphBuilder {
public:
    /// Appends a record and returns its internal id (assigned densely in
    /// insertion order). Throws Error on a duplicate external id.
    PaperId add_paper(PaperRecord record);

    /// Queues a citing -> cited edge. Duplicates are removed at build time;
    /// self-loops are rejected here (callers filter and count them first).
    void add_edge(PaperId citing, PaperId cited);

    std::size_t paper_count() const { return records_.size(); }
    std::optional<PaperId> find(std::string_view external_id) const;

    /// Finalizes the graph. `duplicate_edges`, when given, receives the
    /// number of edges removed by deduplication.
    CitationGraph build(std::uint64_t* duplicate_edges = nullptr) &&;

private:
    std::vector<PaperRecord> records_;
    std::unordered_map<std::string, PaperId> lookup_;
    std::vector<std::pair<PaperId, PaperId>> edges_;
};

} // namespace displace
