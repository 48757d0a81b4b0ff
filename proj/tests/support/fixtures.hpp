#pragma once

// Shared fixtures and deterministic generators for the test suites. All
// randomness goes through mt19937_64 with explicit draw logic (no
// implementation-defined std distributions) so expected values can be frozen.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "displace/citation_graph.hpp"
#include "displace/stats_math.hpp"
#include "displace/types.hpp"

namespace testsupport {

using displace::CitationGraph;
using displace::DocType;
using displace::GraphBuilder;
using displace::PaperId;
using displace::PaperRecord;

// ---------------------------------------------------------------------------
// Deterministic draws

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    // Rejection sampling keeps the draw unbiased and platform-stable.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

inline double gaussian(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
}

/// Discrete power-law draw on x >= x_min via inverse-CDF walk.
inline std::uint64_t draw_powerlaw(std::mt19937_64& rng, double alpha,
                                   std::uint64_t x_min, double zeta_norm) {
    const double u = uniform01(rng) * zeta_norm;
    double acc = 0.0;
    std::uint64_t x = x_min;
    for (;;) {
        acc += std::pow(static_cast<double>(x), -alpha);
        if (acc >= u || x > 100000000ull) return x;
        ++x;
    }
}

inline std::vector<std::uint64_t> sample_powerlaw(std::mt19937_64& rng,
                                                  double alpha,
                                                  std::uint64_t x_min,
                                                  std::size_t n) {
    const double z = displace::hurwitz_zeta(alpha, static_cast<double>(x_min));
    std::vector<std::uint64_t> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(draw_powerlaw(rng, alpha, x_min, z));
    return out;
}

/// Poisson draw by CDF inversion (fine for the small rates used in tests).
inline std::uint64_t draw_poisson(std::mt19937_64& rng, double lambda) {
    const double u = uniform01(rng);
    double p = std::exp(-lambda);
    double cdf = p;
    std::uint64_t x = 0;
    while (cdf < u && x < 10000) {
        ++x;
        p *= lambda / static_cast<double>(x);
        cdf += p;
    }
    return x;
}

inline std::vector<std::uint64_t> sample_truncated_poisson(std::mt19937_64& rng,
                                                           double lambda,
                                                           std::uint64_t t,
                                                           std::size_t n) {
    std::vector<std::uint64_t> out;
    out.reserve(n);
    while (out.size() < n) {
        const std::uint64_t x = draw_poisson(rng, lambda);
        if (x >= t) out.push_back(x);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Graph fixtures

struct PaperSpec {
    std::string id;
    int year;
    DocType doc_type = DocType::JournalArticle;
    std::vector<std::uint32_t> fields = {};
    std::vector<std::string> authors = {};
};

inline CitationGraph make_graph(const std::vector<PaperSpec>& papers,
                                const std::vector<std::pair<std::string, std::string>>& edges) {
    GraphBuilder b;
    for (const auto& p : papers) {
        PaperRecord r;
        r.id = p.id;
        r.year = p.year;
        r.doc_type = p.doc_type;
        r.fields = p.fields;
        r.authors = p.authors;
        b.add_paper(std::move(r));
    }
    for (const auto& [src, dst] : edges) {
        b.add_edge(*b.find(src), *b.find(dst));
    }
    return std::move(b).build();
}

/// Focal F(2000) with references R1, R2; citers A(2005)->F, B(2006)->{F,R1},
/// C(2007)->R1, D(2008)->R2, plus the pre-focal citer E(1995)->R1.
inline CitationGraph g1_graph(bool with_early_citer = false) {
    std::vector<PaperSpec> papers = {
        {"F", 2000}, {"R1", 1990}, {"R2", 1991},
        {"A", 2005}, {"B", 2006}, {"C", 2007}, {"D", 2008},
    };
    std::vector<std::pair<std::string, std::string>> edges = {
        {"F", "R1"}, {"F", "R2"}, {"A", "F"},    {"B", "F"},
        {"B", "R1"}, {"C", "R1"}, {"D", "R2"},
    };
    if (with_early_citer) {
        papers.push_back({"E", 1995});
        edges.emplace_back("E", "R1");
    }
    return make_graph(papers, edges);
}

struct RandomGraphOptions {
    std::size_t max_papers = 200;
    bool with_authors = false;
    bool with_fields = false;
    bool edges_respect_time = false; // citing paper not older than cited
};

/// Random citation graph with random years; edge count ~ U[1, 4n].
inline CitationGraph random_graph(std::mt19937_64& rng,
                                  const RandomGraphOptions& opts = {}) {
    const std::size_t n = 2 + uniform_below(rng, opts.max_papers - 1);
    static const char* kNames[] = {"alice", "bob", "carol", "dave",
                                   "erin",  "frank", "grace", "heidi"};
    GraphBuilder b;
    std::vector<int> years(n);
    for (std::size_t i = 0; i < n; ++i) {
        PaperRecord r;
        r.id = "p" + std::to_string(i);
        r.year = 1900 + static_cast<int>(uniform_below(rng, 121));
        years[i] = r.year;
        r.doc_type = DocType::JournalArticle;
        if (opts.with_authors && uniform_below(rng, 4) != 0) {
            const std::size_t k = 1 + uniform_below(rng, 3);
            for (std::size_t a = 0; a < k; ++a) {
                r.authors.push_back(kNames[uniform_below(rng, 8)]);
            }
        }
        if (opts.with_fields) {
            const std::size_t k = 1 + uniform_below(rng, 3);
            for (std::size_t f = 0; f < k; ++f) {
                r.fields.push_back(static_cast<std::uint32_t>(uniform_below(rng, 12)));
            }
        }
        b.add_paper(std::move(r));
    }
    const std::size_t m = 1 + uniform_below(rng, 4 * n);
    for (std::size_t e = 0; e < m; ++e) {
        const auto src = static_cast<PaperId>(uniform_below(rng, n));
        const auto dst = static_cast<PaperId>(uniform_below(rng, n));
        if (src == dst) continue;
        if (opts.edges_respect_time && years[src] < years[dst]) continue;
        b.add_edge(src, dst); // duplicates removed at build
    }
    return std::move(b).build();
}

// ---------------------------------------------------------------------------

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("displace_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

/// Spearman rank correlation with average ranks for ties; 0 when either side
/// is constant.
inline double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    auto ranks = [n](const std::vector<double>& v) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j < n && v[idx[j]] == v[idx[i]]) ++j;
            const double avg = 0.5 * static_cast<double>(i + j - 1) + 1.0;
            for (std::size_t k = i; k < j; ++k) r[idx[k]] = avg;
            i = j;
        }
        return r;
    };
    const auto rx = ranks(xs);
    const auto ry = ranks(ys);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

} // namespace testsupport
