// displace: citation-graph displacement analytics CLI.
//
// Subcommands: ingest, metrics, zipf, multiples, distfit, overlap, classify,
// report. Data goes to the output files, diagnostics to stderr, and every run
// leaves a <out>.manifest.json sidecar recording the resolved flags, input
// checksums and wall-clock duration.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "displace/corpus.hpp"
#include "displace/displacement.hpp"
#include "displace/distfit.hpp"
#include "displace/errors.hpp"
#include "displace/io_util.hpp"
#include "displace/llm_classifier.hpp"
#include "displace/multiples.hpp"
#include "displace/overlap.hpp"
#include "displace/report.hpp"
#include "displace/snapshot.hpp"
#include "displace/version.hpp"
#include "displace/zipf.hpp"

#include <json.hpp>

namespace {

using namespace displace;

class RunManifest {
public:
    RunManifest(std::string subcommand)
        : subcommand_(std::move(subcommand)),
          start_(std::chrono::steady_clock::now()) {}

    void flag(const std::string& name, const std::string& value) {
        flags_[name] = value;
    }
    void flag(const std::string& name, bool value) {
        flags_[name] = value ? "true" : "false";
    }
    template <typename T>
    void flag(const std::string& name, T value) {
        flags_[name] = std::to_string(value);
    }
    void flag_real(const std::string& name, double value) {
        flags_[name] = format_real(value);
    }

    void input(const std::string& path) { inputs_[path] = to_hex(fnv1a64_file(path)); }
    void output(const std::string& path) { outputs_.push_back(path); }

    void write(const std::string& path) const {
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start_)
                            .count();
        std::ofstream out(path);
        if (!out) throw Error("cannot write manifest: " + path);
        out << "{\"tool_version\":\"" << kToolVersion << "\""
            << ",\"snapshot_format_version\":" << int(kSnapshotVersion)
            << ",\"subcommand\":\"" << subcommand_ << "\",\"flags\":{";
        bool first = true;
        for (const auto& [k, v] : flags_) {
            if (!first) out << ',';
            first = false;
            out << "\"" << json_escape(k) << "\":\"" << json_escape(v) << "\"";
        }
        out << "},\"inputs\":{";
        first = true;
        for (const auto& [k, v] : inputs_) {
            if (!first) out << ',';
            first = false;
            out << "\"" << json_escape(k) << "\":\"" << v << "\"";
        }
        out << "},\"outputs\":[";
        first = true;
        for (const auto& o : outputs_) {
            if (!first) out << ',';
            first = false;
            out << "\"" << json_escape(o) << "\"";
        }
        out << "],\"duration_ms\":" << ms << "}\n";
    }

private:
    std::string subcommand_;
    std::chrono::steady_clock::time_point start_;
    std::map<std::string, std::string> flags_;
    std::map<std::string, std::string> inputs_;
    std::vector<std::string> outputs_;
};

Variant parse_variant(const std::string& s) {
    auto v = variant_from_string(s);
    if (!v) throw Error("unknown variant: " + s);
    return *v;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
    std::string papers, edges, out;
    bool no_journal_only = false;
    bool strict_edges = false;
    int year_min = -1, year_max = -1;
    int plausible_min = 1000, plausible_max = 2100;
};

int run_ingest(const IngestArgs& a) {
    RunManifest manifest("ingest");
    manifest.input(a.papers);
    manifest.input(a.edges);
    manifest.flag("journal_only", !a.no_journal_only);
    manifest.flag("strict_edges", a.strict_edges);
    manifest.flag("plausible_year_min", a.plausible_min);
    manifest.flag("plausible_year_max", a.plausible_max);

    IngestOptions options;
    options.filter.journal_only = !a.no_journal_only;
    options.filter.plausible_year_min = a.plausible_min;
    options.filter.plausible_year_max = a.plausible_max;
    options.unknown_edges =
        a.strict_edges ? UnknownEdgePolicy::Fail : UnknownEdgePolicy::Skip;
    if (a.year_min >= 0 || a.year_max >= 0) {
        const int lo = a.year_min >= 0 ? a.year_min : a.plausible_min;
        const int hi = a.year_max >= 0 ? a.year_max : a.plausible_max;
        if (lo > hi) throw Error("--year-min exceeds --year-max");
        options.filter.year_range = {{lo, hi}};
        manifest.flag("year_min", lo);
        manifest.flag("year_max", hi);
    }

    auto result = ingest_files(a.papers, a.edges, options);
    save_snapshot(result.graph, a.out);
    manifest.output(a.out);

    const auto& s = result.stats;
    std::cerr << "papers: seen " << s.papers_seen << ", kept " << s.papers_kept
              << " (doc-type " << s.papers_rejected_doc_type << ", year-range "
              << s.papers_rejected_year_range << ", implausible-year "
              << s.papers_rejected_implausible_year << " rejected)\n";
    std::cerr << "edges: seen " << s.edges_seen << ", kept " << s.edges_kept
              << " (duplicate " << s.edges_duplicate << ", self-loop "
              << s.edges_self_loop << ", unknown-id " << s.edges_unknown_id
              << ", filtered-endpoint " << s.edges_filtered_endpoint
              << " dropped)\n";
    manifest.write(a.out + ".manifest.json");
    return 0;
}

// ---------------------------------------------------------------------------

struct MetricsArgs {
    std::string snapshot, out;
    std::string variant = "all";
    unsigned popular_threshold = 24;
    bool popular_quartile = false;
    bool no_time_filter = false;
    bool cmax_post_focal_only = false;
    int min_citations = 1, min_references = 1;
    int threads = 0;
};

ReportConfig metrics_config(const MetricsArgs& a) {
    ReportConfig cfg;
    cfg.time_filter = !a.no_time_filter;
    cfg.popular_threshold = a.popular_threshold;
    cfg.popular_quartile = a.popular_quartile;
    cfg.cmax_post_focal_only = a.cmax_post_focal_only;
    cfg.min_citations = a.min_citations;
    cfg.min_references = a.min_references;
    if (a.variant != "all") {
        const Variant v = parse_variant(a.variant);
        cfg.want_d1 = v == Variant::D1;
        cfg.want_d2 = v == Variant::D2;
        cfg.want_d3 = v == Variant::D3;
        cfg.want_d4 = v == Variant::D4;
    }
    return cfg;
}

int run_metrics(const MetricsArgs& a) {
    RunManifest manifest("metrics");
    manifest.input(a.snapshot);
    manifest.flag("variant", a.variant);
    manifest.flag("popular_threshold", a.popular_threshold);
    manifest.flag("popular_quartile", a.popular_quartile);
    manifest.flag("time_filter", !a.no_time_filter);
    manifest.flag("cmax_post_focal_only", a.cmax_post_focal_only);
    manifest.flag("min_citations", a.min_citations);
    manifest.flag("min_references", a.min_references);
    manifest.flag("threads", a.threads);

    auto graph = load_snapshot(a.snapshot);
    auto batch = batch_reports(graph, metrics_config(a), a.threads);

    std::ofstream out(a.out);
    if (!out) throw Error("cannot write " + a.out);
    write_reports_jsonl(out, graph, batch.reports);
    out.close();
    manifest.output(a.out);
    std::cerr << "reports: " << batch.reports.size() << " written, "
              << batch.skipped << " ineligible focals skipped\n";
    manifest.write(a.out + ".manifest.json");
    return 0;
}

// ---------------------------------------------------------------------------

struct ZipfArgs {
    std::string snapshot, out;
    std::uint64_t sample = 1000;
    std::uint64_t seed = 0;
    std::uint64_t min_refs = 3;
    bool drop_zero_counts = false;
};

int run_zipf(const ZipfArgs& a) {
    RunManifest manifest("zipf");
    manifest.input(a.snapshot);
    manifest.flag("sample", a.sample);
    manifest.flag("seed", a.seed);
    manifest.flag("min_refs", a.min_refs);
    manifest.flag("drop_zero_counts", a.drop_zero_counts);

    auto graph = load_snapshot(a.snapshot);
    std::vector<PaperId> eligible;
    for (PaperId p = 0; p < graph.size(); ++p) {
        if (graph.references(p).size() >= a.min_refs) eligible.push_back(p);
    }

    // Seeded partial Fisher-Yates; selected ids are emitted ascending.
    std::mt19937_64 rng(a.seed);
    const std::size_t take = std::min<std::size_t>(a.sample, eligible.size());
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(rng() % (eligible.size() - i));
        std::swap(eligible[i], eligible[j]);
    }
    eligible.resize(take);
    std::sort(eligible.begin(), eligible.end());

    // Fits are independent per paper; rows land in preassigned slots so the
    // output is byte-identical at any thread count.
    ZipfFitOptions options;
    options.drop_zero_counts = a.drop_zero_counts;
    std::vector<std::string> rows(eligible.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(eligible.size()); ++i) {
        const PaperId p = eligible[i];
        try {
            auto fit = fit_zipf(reference_citation_counts(graph, p), options);
            rows[i] = graph.external_id(p) + ',' + format_real(fit.a) + ',' +
                      format_real(fit.b) + ',' + format_real(fit.c) + ',' +
                      format_real(fit.r2_log) + ',' +
                      format_real(fit.ratio_empirical) + ',' +
                      (fit.ratio_theoretical ? format_real(*fit.ratio_theoretical)
                                             : "nan");
        } catch (const FitError&) {
            // left empty; counted below
        }
    }

    std::ofstream out(a.out);
    if (!out) throw Error("cannot write " + a.out);
    out << "paper_id,a,b,c,r2_log,ratio_empirical,ratio_theoretical\n";
    std::uint64_t fitted = 0, failed = 0;
    for (const auto& row : rows) {
        if (row.empty()) {
            ++failed;
        } else {
            out << row << '\n';
            ++fitted;
        }
    }
    out.close();
    manifest.output(a.out);
    std::cerr << "zipf: " << fitted << " fits written, " << failed
              << " unfittable papers skipped (of " << take << " sampled)\n";
    manifest.write(a.out + ".manifest.json");
    return 0;
}

// ---------------------------------------------------------------------------

struct MultiplesArgs {
    std::string snapshot, out, histogram;
    std::uint64_t min_citations = 100;
    double min_d = 0.2;
    std::uint64_t min_pool_size = 2;
    std::string variant = "d0";
    int threads = 0;
};

int run_multiples(const MultiplesArgs& a) {
    RunManifest manifest("multiples");
    manifest.input(a.snapshot);
    manifest.flag("min_citations", a.min_citations);
    manifest.flag_real("min_d", a.min_d);
    manifest.flag("min_pool_size", a.min_pool_size);
    manifest.flag("variant", a.variant);
    manifest.flag("threads", a.threads);

    PoolCriteria criteria;
    criteria.min_citations = a.min_citations;
    criteria.min_d = a.min_d;
    criteria.min_pool_size = a.min_pool_size;
    criteria.variant = parse_variant(a.variant);

    auto graph = load_snapshot(a.snapshot);
    ReportConfig cfg; // defaults; all variants so any --variant works
    auto batch = batch_reports(graph, cfg, a.threads);
    auto pools = find_pools(graph, batch.reports, criteria);

    std::ofstream out(a.out);
    if (!out) throw Error("cannot write " + a.out);
    out << "anchor_id,size,member_ids,min_year,max_year\n";
    for (const auto& pool : pools) {
        out << graph.external_id(pool.anchor) << ',' << pool.size() << ',';
        for (std::size_t i = 0; i < pool.members.size(); ++i) {
            if (i) out << ';';
            out << graph.external_id(pool.members[i]);
        }
        out << ',' << pool.min_year << ',' << pool.max_year << '\n';
    }
    out.close();
    manifest.output(a.out);

    if (!a.histogram.empty()) {
        auto hist = pool_size_histogram(pools);
        std::ofstream h(a.histogram);
        if (!h) throw Error("cannot write " + a.histogram);
        h << "size,count\n";
        for (const auto& [size, count] : hist) h << size << ',' << count << '\n';
        manifest.output(a.histogram);
    }
    std::cerr << "multiples: " << pools.size() << " pools from "
              << batch.reports.size() << " reports\n";
    manifest.write(a.out + ".manifest.json");
    return 0;
}

// ---------------------------------------------------------------------------

struct DistfitArgs {
    std::string input, out;
    int truncation = 0;
    double significance = 0.05;
};

int run_distfit(const DistfitArgs& a) {
    RunManifest manifest("distfit");
    manifest.input(a.input);
    manifest.flag("truncation", a.truncation);
    manifest.flag_real("significance", a.significance);

    auto samples = load_external_histogram(a.input);
    auto cmp = compare_models(samples, a.truncation, a.significance);

    std::ofstream out(a.out);
    if (!out) throw Error("cannot write " + a.out);
    out << "{\"n_samples\":" << samples.size()
        << ",\"poisson\":{\"lambda\":" << format_real(cmp.poisson.lambda)
        << ",\"truncation\":" << cmp.poisson.truncation
        << ",\"log_likelihood\":" << format_real(cmp.poisson.log_likelihood) << "}"
        << ",\"power_law\":{\"alpha\":" << format_real(cmp.power_law.alpha)
        << ",\"x_min\":" << cmp.power_law.x_min
        << ",\"log_likelihood\":" << format_real(cmp.power_law.log_likelihood)
        << ",\"ks_statistic\":" << format_real(cmp.power_law.ks_statistic) << "}"
        << ",\"comparison\":{\"common_support_min\":" << cmp.common_support_min
        << ",\"comparison_alpha\":" << format_real(cmp.comparison_alpha)
        << ",\"n_common\":" << cmp.n_common
        << ",\"llr\":" << format_real(cmp.llr)
        << ",\"p_value\":" << format_real(cmp.p_value)
        << ",\"verdict\":\"" << to_string(cmp.verdict) << "\"}}\n";
    out.close();
    manifest.output(a.out);
    std::cerr << "distfit: verdict " << to_string(cmp.verdict) << " (p = "
              << format_real(cmp.p_value) << ")\n";
    manifest.write(a.out + ".manifest.json");
    return 0;
}

// ---------------------------------------------------------------------------

struct OverlapArgs {
    std::string snapshot, out;
    double d_cutoff = 0.21;
    unsigned fields = 292;
    unsigned labels_per_paper = 2;
    int threads = 0;
};

int run_overlap(const OverlapArgs& a) {
    RunManifest manifest("overlap");
    manifest.input(a.snapshot);
    manifest.flag_real("d_cutoff", a.d_cutoff);
    manifest.flag("fields", a.fields);
    manifest.flag("labels_per_paper", a.labels_per_paper);
    manifest.flag("threads", a.threads);

    auto graph = load_snapshot(a.snapshot);
    auto batch = batch_reports(graph, ReportConfig{}, a.threads);
    auto result = empirical_overlap(graph, batch.reports, a.d_cutoff,
                                    FieldTaxonomy{a.fields, a.labels_per_paper});

    std::ofstream out(a.out);
    if (!out) throw Error("cannot write " + a.out);
    out << "{\"p_empirical\":" << format_real(result.p_empirical)
        << ",\"p_null\":" << format_real(result.p_null)
        << ",\"ratio\":" << format_real(result.ratio)
        << ",\"n_pairs\":" << result.n_pairs
        << ",\"n_excluded\":" << result.n_excluded
        << ",\"d_cutoff\":" << format_real(a.d_cutoff)
        << ",\"fields\":" << a.fields
        << ",\"labels_per_paper\":" << a.labels_per_paper << "}\n";
    out.close();
    manifest.output(a.out);
    std::cerr << "overlap: p_empirical " << format_real(result.p_empirical)
              << " over " << result.n_pairs << " pairs ("
              << result.n_excluded << " excluded)\n";
    manifest.write(a.out + ".manifest.json");
    return 0;
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
    std::string endpoint, model, pairs, out, journal, audit_log;
    std::string mode = "zero_shot";
    int max_in_flight = 8;
    int timeout_sec = 120;
    int max_attempts = 3;
};

int run_classify(const ClassifyArgs& a) {
    RunManifest manifest("classify");
    manifest.input(a.pairs);
    manifest.flag("endpoint", a.endpoint);
    manifest.flag("model", a.model);
    manifest.flag("mode", a.mode);
    manifest.flag("max_in_flight", a.max_in_flight);

    auto mode = prompt_mode_from_string(a.mode);
    if (!mode) throw Error("unknown prompt mode: " + a.mode);

    std::vector<ClassificationRequest> requests;
    std::vector<std::string> ids;
    {
        std::ifstream in(a.pairs);
        if (!in) throw Error("cannot open pairs: " + a.pairs);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            try {
                auto j = nlohmann::json::parse(line);
                ClassificationRequest r;
                r.focal_title = j.at("focal_title").get<std::string>();
                r.focal_abstract = j.at("focal_abstract").get<std::string>();
                r.ref_title = j.at("ref_title").get<std::string>();
                r.ref_abstract = j.at("ref_abstract").get<std::string>();
                r.mode = *mode;
                requests.push_back(std::move(r));
                ids.push_back(j.value("id", std::to_string(line_no)));
            } catch (const nlohmann::json::exception& e) {
                throw ParseError("pairs:" + std::to_string(line_no) + ": " + e.what());
            }
        }
    }

    EndpointConfig endpoint;
    endpoint.base_url = a.endpoint;
    endpoint.model = a.model;
    endpoint.timeout_sec = a.timeout_sec;
    endpoint.retry.max_attempts = a.max_attempts;
    endpoint.audit_log_path = a.audit_log;
    if (const char* key = std::getenv("DISPLACE_LLM_API_KEY")) {
        endpoint.api_key = key;
    }

    BatchOptions options;
    options.max_in_flight = a.max_in_flight;
    options.journal_path = a.journal.empty() ? a.out + ".journal" : a.journal;

    std::ofstream out(a.out);
    if (!out) throw Error("cannot write " + a.out);
    auto stats = classify_batch(
        endpoint, requests, options, [&](const BatchEntry& e) {
            out << "{\"index\":" << e.index << ",\"id\":\""
                << json_escape(ids[e.index]) << "\"";
            if (e.ok) {
                out << ",\"ok\":true,\"p_theory\":" << format_real(e.result.p_theory)
                    << ",\"chosen_option\":" << e.result.chosen_option
                    << ",\"model_id\":\"" << json_escape(e.result.model_id) << "\""
                    << ",\"raw_token_logprobs\":{";
                bool first = true;
                for (const auto& [token, lp] : e.result.raw_token_logprobs) {
                    if (!first) out << ',';
                    first = false;
                    out << "\"" << json_escape(token) << "\":" << format_real(lp);
                }
                out << "}";
            } else {
                out << ",\"ok\":false,\"error\":\"" << json_escape(e.error) << "\"";
            }
            out << "}\n";
        });
    out.close();
    manifest.output(a.out);
    std::cerr << "classify: " << stats.completed << " ok, " << stats.failed
              << " failed, " << stats.resumed << " resumed from journal\n";
    manifest.write(a.out + ".manifest.json");
    return stats.failed == requests.size() && !requests.empty() ? 1 : 0;
}

// ---------------------------------------------------------------------------

struct ReportArgs {
    std::string reports, out_dir;
    int bins = 40;
};

int run_report(const ReportArgs& a) {
    if (a.bins < 1) throw Error("--bins must be at least 1");
    RunManifest manifest("report");
    manifest.input(a.reports);
    manifest.flag("bins", a.bins);

    std::ifstream in(a.reports);
    if (!in) throw Error("cannot open reports: " + a.reports);
    auto loaded = load_reports_jsonl(in);
    write_report_outputs(loaded, a.out_dir, a.bins);
    for (const char* name :
         {"summary.json", "hist_d_f.csv", "hist_d0.csv", "hist_b_f.csv",
          "displacing_fraction_by_year.csv"}) {
        manifest.output((std::filesystem::path(a.out_dir) / name).string());
    }
    std::cerr << "report: " << loaded.size() << " reports summarized into "
              << a.out_dir << "\n";
    manifest.write((std::filesystem::path(a.out_dir) / "manifest.json").string());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"citation-graph displacement analytics"};
    app.set_version_flag("--version", std::string("displace ") + kToolVersion +
                                          " (snapshot format " +
                                          std::to_string(kSnapshotVersion) + ")");
    app.require_subcommand(1);

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand("ingest", "build a snapshot from papers.jsonl + edges.tsv");
    ingest->add_option("--papers", ingest_args.papers, "papers.jsonl input")->required();
    ingest->add_option("--edges", ingest_args.edges, "edges.tsv input")->required();
    ingest->add_option("--out", ingest_args.out, "snapshot output path")->required();
    ingest->add_flag("--no-journal-only", ingest_args.no_journal_only,
                     "keep books and conference papers too");
    ingest->add_flag("--strict-edges", ingest_args.strict_edges,
                     "fail on edges naming unknown paper ids");
    ingest->add_option("--year-min", ingest_args.year_min, "drop papers before this year");
    ingest->add_option("--year-max", ingest_args.year_max, "drop papers after this year");
    ingest->add_option("--plausible-year-min", ingest_args.plausible_min,
                       "reject records before this year (default 1000)");
    ingest->add_option("--plausible-year-max", ingest_args.plausible_max,
                       "reject records after this year (default 2100)");

    MetricsArgs metrics_args;
    auto* metrics = app.add_subcommand("metrics", "per-focal displacement reports");
    metrics->add_option("--snapshot", metrics_args.snapshot, "snapshot input")->required();
    metrics->add_option("--out", metrics_args.out, "reports.jsonl output")->required();
    metrics->add_option("--variant", metrics_args.variant,
                        "d0|d1|d2|d3|d4|all (default all)");
    metrics->add_option("--popular-threshold", metrics_args.popular_threshold,
                        "citation floor for popular references (default 24)");
    metrics->add_flag("--popular-quartile", metrics_args.popular_quartile,
                      "derive the popularity floor from the corpus top quartile");
    metrics->add_flag("--no-time-filter", metrics_args.no_time_filter,
                      "count citers published before the focal too");
    metrics->add_flag("--cmax-post-focal-only", metrics_args.cmax_post_focal_only,
                      "count only citations with year >= the focal's");
    metrics->add_option("--min-citations", metrics_args.min_citations,
                        "focal eligibility floor (default 1)");
    metrics->add_option("--min-references", metrics_args.min_references,
                        "focal eligibility floor (default 1)");
    metrics->add_option("--threads", metrics_args.threads, "worker cap (0 = all cores)");

    ZipfArgs zipf_args;
    auto* zipf = app.add_subcommand("zipf", "rank-curve fits over sampled papers");
    zipf->add_option("--snapshot", zipf_args.snapshot, "snapshot input")->required();
    zipf->add_option("--out", zipf_args.out, "CSV output")->required();
    zipf->add_option("--sample", zipf_args.sample, "papers to sample (default 1000)");
    zipf->add_option("--seed", zipf_args.seed, "sampling seed (default 0)");
    zipf->add_option("--min-refs", zipf_args.min_refs,
                     "minimum references per sampled paper (default 3)");
    zipf->add_flag("--drop-zero-counts", zipf_args.drop_zero_counts,
                   "drop zero-citation references instead of keeping their ranks");

    MultiplesArgs multiples_args;
    auto* multiples = app.add_subcommand("multiples", "shared-anchor discovery pools");
    multiples->add_option("--snapshot", multiples_args.snapshot, "snapshot input")->required();
    multiples->add_option("--out", multiples_args.out, "pools CSV output")->required();
    multiples->add_option("--histogram", multiples_args.histogram,
                          "also write a size,count histogram CSV");
    multiples->add_option("--min-citations", multiples_args.min_citations,
                          "qualification floor on c_f (default 100)");
    multiples->add_option("--min-d", multiples_args.min_d,
                          "strict lower bound on the variant value (default 0.2)");
    multiples->add_option("--min-pool-size", multiples_args.min_pool_size,
                          "smallest pool to keep (default 2)");
    multiples->add_option("--variant", multiples_args.variant,
                          "variant the threshold applies to (default d0)");
    multiples->add_option("--threads", multiples_args.threads, "worker cap (0 = all cores)");

    DistfitArgs distfit_args;
    auto* distfit = app.add_subcommand("distfit", "Poisson vs power-law comparison");
    distfit->add_option("--input", distfit_args.input, "value,count histogram CSV")->required();
    distfit->add_option("--truncation", distfit_args.truncation,
                        "Poisson truncation point in {0,1,2}")->required();
    distfit->add_option("--significance", distfit_args.significance,
                        "verdict significance level (default 0.05)");
    distfit->add_option("--out", distfit_args.out, "fit JSON output")->required();

    OverlapArgs overlap_args;
    auto* overlap = app.add_subcommand("overlap", "field overlap vs the random null");
    overlap->add_option("--snapshot", overlap_args.snapshot, "snapshot input")->required();
    overlap->add_option("--out", overlap_args.out, "JSON output")->required();
    overlap->add_option("--d-cutoff", overlap_args.d_cutoff,
                        "D0 cutoff for pairs (default 0.21)");
    overlap->add_option("--fields", overlap_args.fields,
                        "taxonomy size (default 292)");
    overlap->add_option("--labels-per-paper", overlap_args.labels_per_paper,
                        "null-model labels per paper (default 2)");
    overlap->add_option("--threads", overlap_args.threads, "worker cap (0 = all cores)");

    ClassifyArgs classify_args;
    auto* classify = app.add_subcommand("classify", "theory-vs-method classification via an LLM endpoint");
    classify->add_option("--endpoint", classify_args.endpoint, "chat-completions base URL")->required();
    classify->add_option("--model", classify_args.model, "model name")->required();
    classify->add_option("--pairs", classify_args.pairs, "pairs.jsonl input")->required();
    classify->add_option("--out", classify_args.out, "results.jsonl output")->required();
    classify->add_option("--mode", classify_args.mode,
                         "zero_shot|few_shot|concrete_wording|three_option");
    classify->add_option("--max-in-flight", classify_args.max_in_flight,
                         "concurrent requests (default 8)");
    classify->add_option("--journal", classify_args.journal,
                         "progress journal path (default <out>.journal)");
    classify->add_option("--timeout-sec", classify_args.timeout_sec,
                         "per-request timeout (default 120)");
    classify->add_option("--max-attempts", classify_args.max_attempts,
                         "attempts per request (default 3)");
    classify->add_option("--audit-log", classify_args.audit_log,
                         "append raw request/response JSONL here");

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "summaries and plot data from reports.jsonl");
    report->add_option("--reports", report_args.reports, "reports.jsonl input")->required();
    report->add_option("--out-dir", report_args.out_dir, "output directory")->required();
    report->add_option("--bins", report_args.bins, "histogram bins (default 40)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) return run_ingest(ingest_args);
        if (*metrics) return run_metrics(metrics_args);
        if (*zipf) return run_zipf(zipf_args);
        if (*multiples) return run_multiples(multiples_args);
        if (*distfit) return run_distfit(distfit_args);
        if (*overlap) return run_overlap(overlap_args);
        if (*classify) return run_classify(classify_args);
        if (*report) return run_report(report_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
