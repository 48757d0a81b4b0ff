#include "displace_reference.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "displace/errors.hpp"

namespace displace::reference {

namespace {

std::vector<PaperId> refs_of(const EdgeListGraph& g, PaperId p) {
    std::vector<PaperId> out;
    for (const auto& [citing, cited] : g.edges) {
        if (citing == p) out.push_back(cited);
    }
    return out;
}

std::vector<PaperId> citers_of(const EdgeListGraph& g, PaperId p) {
    std::vector<PaperId> out;
    for (const auto& [citing, cited] : g.edges) {
        if (cited == p) out.push_back(citing);
    }
    return out;
}

bool edge_exists(const EdgeListGraph& g, PaperId citing, PaperId cited) {
    for (const auto& [a, b] : g.edges) {
        if (a == citing && b == cited) return true;
    }
    return false;
}

bool any_shared_author(const PaperRecord& a, const PaperRecord& b) {
    for (const auto& x : a.authors) {
        for (const auto& y : b.authors) {
            if (x == y) return true;
        }
    }
    return false;
}

std::uint64_t citations_excluding(const EdgeListGraph& g, PaperId ref,
                                  PaperId excluded) {
    std::uint64_t n = 0;
    for (const auto& [citing, cited] : g.edges) {
        if (cited == ref && citing != excluded) ++n;
    }
    return n;
}

struct NaiveTriple {
    std::uint64_t n_i = 0, n_j = 0, n_k = 0, w_j = 0;
};

NaiveTriple classify(const EdgeListGraph& g, PaperId focal,
                     const std::vector<PaperId>& eligible_refs,
                     bool time_filter, bool exclude_self_citations) {
    const int focal_year = g.papers[focal].year;
    NaiveTriple t;
    for (PaperId candidate = 0; candidate < g.papers.size(); ++candidate) {
        if (candidate == focal) continue;
        if (time_filter && g.papers[candidate].year < focal_year) continue;
        if (exclude_self_citations &&
            any_shared_author(g.papers[candidate], g.papers[focal])) {
            continue;
        }
        const bool cites_focal = edge_exists(g, candidate, focal);
        std::uint64_t refs_cited = 0;
        for (PaperId r : eligible_refs) {
            if (edge_exists(g, candidate, r)) ++refs_cited;
        }
        if (cites_focal && refs_cited == 0) {
            ++t.n_i;
        } else if (cites_focal && refs_cited > 0) {
            ++t.n_j;
            t.w_j += refs_cited;
        } else if (refs_cited > 0) {
            ++t.n_k;
        }
    }
    return t;
}

} // namespace

EdgeListGraph EdgeListGraph::from(const CitationGraph& graph) {
    EdgeListGraph g;
    g.papers.resize(graph.size());
    for (PaperId p = 0; p < graph.size(); ++p) {
        auto& rec = g.papers[p];
        rec.id = graph.external_id(p);
        rec.year = graph.year(p);
        rec.doc_type = graph.doc_type(p);
        rec.fields.assign(graph.fields(p).begin(), graph.fields(p).end());
        rec.authors.assign(graph.authors(p).begin(), graph.authors(p).end());
        for (PaperId r : graph.references(p)) {
            g.edges.emplace_back(p, r);
        }
    }
    return g;
}

DisplacementReport naive_decompose(const EdgeListGraph& g, PaperId focal,
                                   const ReportConfig& config) {
    const auto refs = refs_of(g, focal);
    const auto citers = citers_of(g, focal);
    const auto min_refs = static_cast<std::size_t>(std::max(1, config.min_references));
    const auto min_cites = static_cast<std::size_t>(std::max(1, config.min_citations));
    if (refs.size() < min_refs || citers.size() < min_cites) {
        throw IneligibleFocalError("ineligible focal (reference oracle)");
    }

    NaiveTriple base = classify(g, focal, refs, config.time_filter, false);
    if (base.n_i + base.n_j == 0) {
        throw IneligibleFocalError("no post-filter citers (reference oracle)");
    }

    DisplacementReport rep;
    rep.focal = focal;
    rep.year = g.papers[focal].year;
    rep.triple = {base.n_i, base.n_j, base.n_k, base.w_j};
    rep.c_f = base.n_i + base.n_j;
    rep.d0 = (static_cast<double>(base.n_i) - static_cast<double>(base.n_j)) /
             static_cast<double>(base.n_i + base.n_j + base.n_k);
    rep.d_f = (static_cast<double>(base.n_i) - static_cast<double>(base.n_j)) /
              static_cast<double>(rep.c_f);
    rep.r_k = static_cast<double>(base.n_k) / static_cast<double>(rep.c_f);

    // Most-cited reference: count, then earlier year, then external id.
    PaperId top = kInvalidPaper;
    std::uint64_t top_count = 0;
    for (PaperId r : refs) {
        std::uint64_t count = 0;
        for (const auto& [citing, cited] : g.edges) {
            if (cited != r) continue;
            if (config.cmax_post_focal_only &&
                g.papers[citing].year < g.papers[focal].year) {
                continue;
            }
            ++count;
        }
        bool better = false;
        if (top == kInvalidPaper) {
            better = true;
        } else if (count != top_count) {
            better = count > top_count;
        } else if (g.papers[r].year != g.papers[top].year) {
            better = g.papers[r].year < g.papers[top].year;
        } else {
            better = g.papers[r].id < g.papers[top].id;
        }
        if (better) {
            top = r;
            top_count = count;
        }
    }
    rep.top_reference = top;
    rep.c_max = top_count;
    rep.b_f = static_cast<double>(top_count) / static_cast<double>(rep.c_f);

    if (config.want_d3) {
        rep.d3 = static_cast<double>(base.n_i) / static_cast<double>(rep.c_f);
    }
    if (config.want_d4) {
        rep.d4 = static_cast<double>(base.n_i) /
                 static_cast<double>(base.n_i + base.w_j);
    }
    if (config.want_d1) {
        if (g.papers[focal].authors.empty()) {
            rep.d1 = rep.d0;
            rep.d1_degraded = true;
        } else {
            NaiveTriple t1 = classify(g, focal, refs, config.time_filter, true);
            const std::uint64_t denom = t1.n_i + t1.n_j + t1.n_k;
            if (denom > 0) {
                rep.d1 = (static_cast<double>(t1.n_i) - static_cast<double>(t1.n_j)) /
                         static_cast<double>(denom);
            }
        }
    }
    if (config.want_d2) {
        std::vector<PaperId> popular;
        for (PaperId r : refs) {
            if (citations_excluding(g, r, focal) >= config.popular_threshold) {
                popular.push_back(r);
            }
        }
        NaiveTriple t2 = classify(g, focal, popular, config.time_filter, false);
        const std::uint64_t denom = t2.n_i + t2.n_j + t2.n_k;
        if (denom > 0) {
            rep.d2 = (static_cast<double>(t2.n_i) - static_cast<double>(t2.n_j)) /
                     static_cast<double>(denom);
        }
    }
    return rep;
}

std::vector<DisplacementReport> naive_batch(const EdgeListGraph& g,
                                            const ReportConfig& config) {
    std::vector<DisplacementReport> out;
    for (PaperId p = 0; p < g.papers.size(); ++p) {
        try {
            out.push_back(naive_decompose(g, p, config));
        } catch (const IneligibleFocalError&) {
        }
    }
    return out;
}

std::vector<std::uint64_t> naive_citer_counts(const EdgeListGraph& g) {
    std::vector<std::uint64_t> counts(g.papers.size(), 0);
    for (PaperId p = 0; p < g.papers.size(); ++p) {
        std::set<PaperId> distinct;
        for (const auto& [citing, cited] : g.edges) {
            if (cited == p) distinct.insert(citing);
        }
        counts[p] = distinct.size();
    }
    return counts;
}

SignCounts sign_fraction_recount(const EdgeListGraph& g,
                                 const ReportConfig& config) {
    std::unordered_map<PaperId, std::vector<PaperId>> refs, citers;
    for (const auto& [citing, cited] : g.edges) {
        refs[citing].push_back(cited);
        citers[cited].push_back(citing);
    }

    const auto min_refs = static_cast<std::size_t>(std::max(1, config.min_references));
    const auto min_cites = static_cast<std::size_t>(std::max(1, config.min_citations));

    SignCounts out;
    for (PaperId f = 0; f < g.papers.size(); ++f) {
        auto refs_it = refs.find(f);
        auto citers_it = citers.find(f);
        if (refs_it == refs.end() || refs_it->second.size() < min_refs) continue;
        if (citers_it == citers.end() || citers_it->second.size() < min_cites) continue;

        const int focal_year = g.papers[f].year;
        std::unordered_set<PaperId> ref_set(refs_it->second.begin(),
                                            refs_it->second.end());
        std::uint64_t n_c = 0; // eligible citers of the focal
        std::uint64_t n_j = 0; // of those, citing >= 1 reference
        for (PaperId x : citers_it->second) {
            if (config.time_filter && g.papers[x].year < focal_year) continue;
            ++n_c;
            auto x_refs = refs.find(x);
            if (x_refs == refs.end()) continue;
            for (PaperId r : x_refs->second) {
                if (ref_set.count(r)) {
                    ++n_j;
                    break;
                }
            }
        }
        if (n_c == 0) continue;
        ++out.reports;

        // d_f sign: n_i - n_j = n_c - 2 n_j.
        if (n_c > 2 * n_j) {
            ++out.d_f_positive;
        } else if (n_c < 2 * n_j) {
            ++out.d_f_negative;
        } else {
            ++out.d_f_zero;
        }

        std::uint64_t c_max = 0;
        for (PaperId r : refs_it->second) {
            std::uint64_t count = 0;
            auto it = citers.find(r);
            if (it != citers.end()) {
                if (config.cmax_post_focal_only) {
                    for (PaperId x : it->second) {
                        if (g.papers[x].year >= focal_year) ++count;
                    }
                } else {
                    count = it->second.size();
                }
            }
            c_max = std::max(c_max, count);
        }
        if (c_max > n_c) ++out.b_f_gt1; // b_f = c_max / c_f
    }
    return out;
}

} // namespace displace::reference
