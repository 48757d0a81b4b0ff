#pragma once

#include <iosfwd>
#include <string>

#include "displace/citation_graph.hpp"
#include "displace/types.hpp"

namespace displace {

struct IngestOptions {
    CorpusFilter filter;
    UnknownEdgePolicy unknown_edges = UnknownEdgePolicy::Skip;
};

struct IngestResult {
    CitationGraph graph;
    IngestStats stats;
};

/// Parses one papers.jsonl line. `line_no` is 1-based and used in errors.
PaperRecord parse_paper_line(std::string_view line, std::size_t line_no);

/// Ingests line-delimited paper records and tab-separated citing/cited pairs,
/// applying the record-level filters, dropping edges whose endpoints did not
/// survive, deduplicating, and rejecting self-loops.
IngestResult ingest_streams(std::istream& papers, std::istream& edges,
                            const IngestOptions& options);

IngestResult ingest_files(const std::string& papers_path,
                          const std::string& edges_path,
                          const IngestOptions& options);

} // namespace displace
