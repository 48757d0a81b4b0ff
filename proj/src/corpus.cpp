#include "displace/corpus.hpp"

#include <fstream>
#include <istream>
#include <unordered_set>

#include <json.hpp>

#include "displace/errors.hpp"

namespace displace {

namespace {

[[noreturn]] void parse_fail(std::string_view source, std::size_t line_no,
                             const std::string& what) {
    throw ParseError(std::string(source) + ":" + std::to_string(line_no) + ": " + what);
}

bool record_passes(const PaperRecord& r, const CorpusFilter& f, IngestStats& stats) {
    if (r.year < f.plausible_year_min || r.year > f.plausible_year_max) {
        ++stats.papers_rejected_implausible_year;
        return false;
    }
    if (f.journal_only && r.doc_type != DocType::JournalArticle) {
        ++stats.papers_rejected_doc_type;
        return false;
    }
    if (f.year_range &&
        (r.year < f.year_range->first || r.year > f.year_range->second)) {
        ++stats.papers_rejected_year_range;
        return false;
    }
    return true;
}

} // namespace

PaperRecord parse_paper_line(std::string_view line, std::size_t line_no) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        parse_fail("papers", line_no, e.what());
    }
    if (!j.is_object()) parse_fail("papers", line_no, "record is not an object");

    PaperRecord r;
    try {
        r.id = j.at("id").get<std::string>();
        r.year = j.at("year").get<int>();
        r.doc_type = doc_type_from_string(j.at("doc_type").get<std::string>());
        if (j.contains("fields")) {
            for (const auto& f : j.at("fields")) {
                auto v = f.get<std::int64_t>();
                if (v < 0) parse_fail("papers", line_no, "negative field label");
                r.fields.push_back(static_cast<std::uint32_t>(v));
            }
        }
        if (j.contains("authors") && !j.at("authors").is_null()) {
            for (const auto& a : j.at("authors")) {
                r.authors.push_back(a.get<std::string>());
            }
        }
    } catch (const ParseError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        parse_fail("papers", line_no, e.what());
    }
    if (r.id.empty()) parse_fail("papers", line_no, "empty paper id");
    return r;
}

IngestResult ingest_streams(std::istream& papers, std::istream& edges,
                            const IngestOptions& options) {
    IngestResult result;
    IngestStats& stats = result.stats;

    GraphBuilder builder;
    // External ids that appeared in the papers input but were filtered out,
    // so unknown-id edges can be told apart from filtered-endpoint edges.
    std::unordered_set<std::string> filtered_ids;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(papers, line)) {
        ++line_no;
        if (line.empty()) continue;
        ++stats.papers_seen;
        PaperRecord r = parse_paper_line(line, line_no);
        if (builder.find(r.id) || filtered_ids.count(r.id)) {
            parse_fail("papers", line_no, "duplicate paper id: " + r.id);
        }
        if (!record_passes(r, options.filter, stats)) {
            filtered_ids.insert(std::move(r.id));
            continue;
        }
        ++stats.papers_kept;
        builder.add_paper(std::move(r));
    }

    line_no = 0;
    while (std::getline(edges, line)) {
        ++line_no;
        if (line.empty()) continue;
        ++stats.edges_seen;
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
            parse_fail("edges", line_no, "expected citing<TAB>cited");
        }
        std::string citing = line.substr(0, tab);
        std::string cited = line.substr(tab + 1);
        if (!cited.empty() && cited.back() == '\r') cited.pop_back();
        if (cited.empty()) parse_fail("edges", line_no, "empty cited id");

        if (citing == cited) {
            ++stats.edges_self_loop;
            continue;
        }
        auto src = builder.find(citing);
        auto dst = builder.find(cited);
        if (!src || !dst) {
            const bool known = (src || filtered_ids.count(citing)) &&
                               (dst || filtered_ids.count(cited));
            if (known) {
                ++stats.edges_filtered_endpoint;
                continue;
            }
            if (options.unknown_edges == UnknownEdgePolicy::Fail) {
                parse_fail("edges", line_no,
                           "edge references unknown id: " + (!src && !filtered_ids.count(citing) ? citing : cited));
            }
            ++stats.edges_unknown_id;
            continue;
        }
        builder.add_edge(*src, *dst);
    }

    result.graph = std::move(builder).build(&stats.edges_duplicate);
    stats.edges_kept = result.graph.edge_count();
    return result;
}

IngestResult ingest_files(const std::string& papers_path,
                          const std::string& edges_path,
                          const IngestOptions& options) {
    std::ifstream papers(papers_path);
    if (!papers) throw Error("cannot open papers input: " + papers_path);
    std::ifstream edges(edges_path);
    if (!edges) throw Error("cannot open edges input: " + edges_path);
    return ingest_streams(papers, edges, options);
}

} // namespace displace
