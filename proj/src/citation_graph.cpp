#include "displace/citation_graph.hpp"

#include <algorithm>

#include "displace/errors.hpp"

namespace displace {

DocType doc_type_from_string(std::string_view s) {
    if (s == "journal-article") return DocType::JournalArticle;
    if (s == "book") return DocType::Book;
    if (s == "conference") return DocType::Conference;
    return DocType::Other;
}

std::string_view to_string(DocType t) {
    switch (t) {
    case DocType::JournalArticle: return "journal-article";
    case DocType::Book: return "book";
    case DocType::Conference: return "conference";
    default: return "other";
    }
}

bool CitationGraph::cites(PaperId citing, PaperId cited) const {
    auto row = out_.row(citing);
    return std::binary_search(row.begin(), row.end(), cited);
}

std::span<const std::string> CitationGraph::authors(PaperId p) const {
    if (author_offsets_.empty()) return {};
    return {author_pool_.data() + author_offsets_[p],
            author_pool_.data() + author_offsets_[p + 1]};
}

std::optional<PaperId> CitationGraph::find(std::string_view external_id) const {
    auto it = lookup_.find(std::string(external_id));
    return it == lookup_.end() ? std::nullopt : std::optional<PaperId>(it->second);
}

PaperId GraphBuilder::add_paper(PaperRecord record) {
    auto [it, inserted] =
        lookup_.emplace(record.id, static_cast<PaperId>(records_.size()));
    if (!inserted) {
        throw Error("duplicate paper id: " + record.id);
    }
    std::sort(record.fields.begin(), record.fields.end());
    record.fields.erase(std::unique(record.fields.begin(), record.fields.end()),
                        record.fields.end());
    records_.push_back(std::move(record));
    return it->second;
}

void GraphBuilder::add_edge(PaperId citing, PaperId cited) {
    if (citing == cited) {
        throw Error("self-loop edge rejected at builder level");
    }
    edges_.emplace_back(citing, cited);
}

std::optional<PaperId> GraphBuilder::find(std::string_view external_id) const {
    auto it = lookup_.find(std::string(external_id));
    return it == lookup_.end() ? std::nullopt : std::optional<PaperId>(it->second);
}

CitationGraph GraphBuilder::build(std::uint64_t* duplicate_edges) && {
    const std::size_t n = records_.size();

    std::sort(edges_.begin(), edges_.end());
    auto last = std::unique(edges_.begin(), edges_.end());
    if (duplicate_edges) {
        *duplicate_edges = static_cast<std::uint64_t>(edges_.end() - last);
    }
    edges_.erase(last, edges_.end());
    const std::size_t m = edges_.size();

    CitationGraph g;
    g.external_ids_.reserve(n);
    g.years_.reserve(n);
    g.doc_types_.reserve(n);
    g.lookup_ = std::move(lookup_);

    g.fields_.offsets.assign(n + 1, 0);
    bool any_authors = false;
    for (const auto& r : records_) {
        if (!r.authors.empty()) any_authors = true;
    }
    if (any_authors) g.author_offsets_.assign(n + 1, 0);

    for (std::size_t i = 0; i < n; ++i) {
        auto& r = records_[i];
        g.external_ids_.push_back(std::move(r.id));
        g.years_.push_back(r.year);
        g.doc_types_.push_back(r.doc_type);
        g.fields_.offsets[i + 1] = g.fields_.offsets[i] + r.fields.size();
        for (auto f : r.fields) g.fields_.targets.push_back(f);
        if (any_authors) {
            g.author_offsets_[i + 1] = g.author_offsets_[i] + r.authors.size();
            for (auto& a : r.authors) g.author_pool_.push_back(std::move(a));
        }
    }
    records_.clear();

    // Out-CSR straight from the sorted edge list; edges are already grouped
    // by source and sorted by target.
    g.out_.offsets.assign(n + 1, 0);
    for (const auto& [src, dst] : edges_) {
        (void)dst;
        ++g.out_.offsets[src + 1];
    }
    for (std::size_t i = 0; i < n; ++i) g.out_.offsets[i + 1] += g.out_.offsets[i];
    g.out_.targets.reserve(m);
    for (const auto& [src, dst] : edges_) {
        (void)src;
        g.out_.targets.push_back(dst);
    }

    // In-CSR by counting sort; sources within a row come out ascending
    // because the edge list is sorted by source.
    g.in_.offsets.assign(n + 1, 0);
    for (const auto& [src, dst] : edges_) {
        (void)src;
        ++g.in_.offsets[dst + 1];
    }
    for (std::size_t i = 0; i < n; ++i) g.in_.offsets[i + 1] += g.in_.offsets[i];
    g.in_.targets.assign(m, 0);
    std::vector<std::uint64_t> cursor(g.in_.offsets.begin(), g.in_.offsets.end() - 1);
    for (const auto& [src, dst] : edges_) {
        g.in_.targets[cursor[dst]++] = src;
    }
    edges_.clear();
    edges_.shrink_to_fit();

    return g;
}

} // namespace displace
