#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace displace {

/// Dense internal paper id assigned at ingest, in input order.
using PaperId = std::uint32_t;

inline constexpr PaperId kInvalidPaper = 0xffffffffu;

enum class DocType : std::uint8_t {
    JournalArticle = 0,
    Book = 1,
    Conference = 2,
    Other = 3,
};

/// Maps the wire string to the enum; unrecognized strings map to Other.
DocType doc_type_from_string(std::string_view s);
std::string_view to_string(DocType t);

/// One paper's metadata as ingested. `id` is the corpus-unique external id;
/// internal dense ids are assigned by the graph builder.
struct PaperRecord {
    std::string id;
    int year = 0;
    DocType doc_type = DocType::Other;
    std::vector<std::uint32_t> fields; // distinct, sorted ascending
    std::vector<std::string> authors;  // may be empty (unknown)
};

/// Record- and eligibility-level corpus filter. `journal_only`, `year_range`
/// and the plausible-year window drop records at ingest; `min_references` /
/// `min_citations` are the focal-eligibility floors consumed by the analysis
/// sweeps (a citing-only paper stays in the graph so it can be counted as a
/// citer of others).
struct CorpusFilter {
    bool journal_only = true;
    int min_references = 1;
    int min_citations = 1;
    std::optional<std::pair<int, int>> year_range;
    int plausible_year_min = 1000;
    int plausible_year_max = 2100;
};

enum class UnknownEdgePolicy : std::uint8_t {
    Skip, // drop the edge, keep a count
    Fail, // raise ParseError
};

struct IngestStats {
    std::uint64_t papers_seen = 0;
    std::uint64_t papers_kept = 0;
    std::uint64_t papers_rejected_doc_type = 0;
    std::uint64_t papers_rejected_year_range = 0;
    std::uint64_t papers_rejected_implausible_year = 0;
    std::uint64_t edges_seen = 0;
    std::uint64_t edges_kept = 0;
    std::uint64_t edges_duplicate = 0;
    std::uint64_t edges_self_loop = 0;
    std::uint64_t edges_unknown_id = 0;       // endpoint never appeared in papers input
    std::uint64_t edges_filtered_endpoint = 0; // endpoint seen but filtered out
};

} // namespace displace
