// Benchmark: the serial reference sweep vs the CSR/OpenMP batch sweep.
//
// Two legs:
//   1. reference leg -- a corpus small enough for the exhaustive edge-list
//      reference (quadratic in graph size); outputs are checked byte-for-byte
//      against the engine.
//   2. scaling leg -- a larger corpus swept by the engine alone at 1..T
//      threads, with cross-thread-count output equality checked.
//
//   bench_sweep [ref_papers] [scale_papers] [avg_out_degree] [seed] [max_threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "displace/citation_graph.hpp"
#include "displace/displacement.hpp"
#include "displace/parallel.hpp"
#include "displace/report.hpp"
#include "displace_reference.hpp"

using namespace displace;

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

CitationGraph synthetic_graph(std::size_t n, double avg_degree,
                              std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    GraphBuilder b;
    for (std::size_t i = 0; i < n; ++i) {
        PaperRecord r;
        r.id = "p" + std::to_string(i);
        r.year = 1900 + static_cast<int>(i * 120 / n);
        r.doc_type = DocType::JournalArticle;
        b.add_paper(std::move(r));
    }
    // References point into the earlier range with a quadratic skew so
    // citation counts are long-tailed like real corpora.
    const auto edges = static_cast<std::size_t>(avg_degree * static_cast<double>(n));
    for (std::size_t e = 0; e < edges; ++e) {
        const auto src = static_cast<PaperId>(1 + rng() % (n - 1));
        const double u = uniform01(rng);
        const auto dst = static_cast<PaperId>(
            static_cast<std::size_t>(u * u * static_cast<double>(src)));
        if (dst == src) continue;
        b.add_edge(src, dst);
    }
    return std::move(b).build();
}

std::string serialized(const CitationGraph& g,
                       const std::vector<DisplacementReport>& reports) {
    std::ostringstream out;
    write_reports_jsonl(out, g, reports);
    return out.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

} // namespace

int main(int argc, char** argv) {
    const std::size_t n_ref = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 300;
    const std::size_t n_scale = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 50000;
    const double degree = argc > 3 ? std::strtod(argv[3], nullptr) : 8.0;
    const std::uint64_t seed = argc > 4 ? std::strtoull(argv[4], nullptr, 10) : 1;
    const int max_threads = argc > 5 ? std::atoi(argv[5]) : effective_threads(0);

    const ReportConfig cfg;

    {
        std::printf("-- reference leg: %zu papers, avg degree %.1f --\n", n_ref,
                    degree);
        auto g = synthetic_graph(n_ref, degree, seed);
        std::printf("graph: %zu papers, %zu edges\n", g.size(), g.edge_count());

        auto t0 = std::chrono::steady_clock::now();
        auto ref = reference::naive_batch(reference::EdgeListGraph::from(g), cfg);
        const double t_ref = seconds_since(t0);
        const std::string ref_bytes = serialized(g, ref);
        std::printf("%-24s %10.3fs   (%zu reports)\n", "serial reference", t_ref,
                    ref.size());

        t0 = std::chrono::steady_clock::now();
        auto batch = batch_reports(g, cfg, max_threads);
        const double t_eng = seconds_since(t0);
        const bool same = serialized(g, batch.reports) == ref_bytes;
        std::printf("%-24s %10.3fs   speedup %8.1fx   %s\n\n", "csr engine",
                    t_eng, t_ref / t_eng,
                    same ? "outputs identical" : "OUTPUT MISMATCH");
        if (!same) return 1;
    }

    {
        std::printf("-- scaling leg: %zu papers, avg degree %.1f --\n", n_scale,
                    degree);
        auto g = synthetic_graph(n_scale, degree, seed);
        std::printf("graph: %zu papers, %zu edges\n", g.size(), g.edge_count());

        std::string baseline;
        double t1 = 0.0;
        for (int threads = 1; threads <= max_threads; threads *= 2) {
            auto t0 = std::chrono::steady_clock::now();
            auto batch = batch_reports(g, cfg, threads);
            const double t_par = seconds_since(t0);
            const std::string bytes = serialized(g, batch.reports);
            if (threads == 1) {
                baseline = bytes;
                t1 = t_par;
            }
            const bool same = bytes == baseline;
            std::printf("csr engine %2d thread%s %10.3fs   speedup vs 1T %6.2fx   %s\n",
                        threads, threads == 1 ? " " : "s", t_par, t1 / t_par,
                        same ? "outputs identical" : "OUTPUT MISMATCH");
            if (!same) return 1;
        }
    }
    return 0;
}
