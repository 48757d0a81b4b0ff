#include "displace/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "displace/errors.hpp"
#include "displace/io_util.hpp"

namespace displace {

namespace {

std::string opt_real(const std::optional<double>& v) {
    return v ? format_real(*v) : "null";
}

} // namespace

void write_reports_jsonl(std::ostream& out, const CitationGraph& graph,
                         std::span<const DisplacementReport> reports) {
    for (const auto& r : reports) {
        out << "{\"id\":\"" << json_escape(graph.external_id(r.focal)) << "\""
            << ",\"year\":" << r.year
            << ",\"n_i\":" << r.triple.n_i
            << ",\"n_j\":" << r.triple.n_j
            << ",\"n_k\":" << r.triple.n_k
            << ",\"w_j\":" << r.triple.w_j
            << ",\"d0\":" << format_real(r.d0)
            << ",\"d1\":" << opt_real(r.d1)
            << ",\"d2\":" << opt_real(r.d2)
            << ",\"d3\":" << opt_real(r.d3)
            << ",\"d4\":" << opt_real(r.d4)
            << ",\"d_f\":" << format_real(r.d_f)
            << ",\"r_k\":" << format_real(r.r_k)
            << ",\"c_f\":" << r.c_f
            << ",\"c_max\":" << r.c_max
            << ",\"b_f\":" << format_real(r.b_f)
            << ",\"top_reference\":\""
            << json_escape(graph.external_id(r.top_reference)) << "\""
            << ",\"d1_degraded\":" << (r.d1_degraded ? "true" : "false")
            << "}\n";
    }
}

std::vector<LoadedReport> load_reports_jsonl(std::istream& in) {
    std::vector<LoadedReport> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            LoadedReport r;
            r.id = j.at("id").get<std::string>();
            r.year = j.at("year").get<int>();
            r.d0 = j.at("d0").get<double>();
            r.d_f = j.at("d_f").get<double>();
            r.b_f = j.at("b_f").get<double>();
            r.c_f = j.at("c_f").get<std::uint64_t>();
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("reports:" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

ReportSummary summarize_reports(std::span<const LoadedReport> reports) {
    if (reports.empty()) throw Error("no reports to summarize");
    ReportSummary s;
    s.n_reports = reports.size();
    std::uint64_t df_neg = 0, df_pos = 0, df_zero = 0;
    std::uint64_t d0_neg = 0, d0_pos = 0, d0_zero = 0;
    std::uint64_t bf_gt = 0, bf_lt = 0, bf_eq = 0;
    for (const auto& r : reports) {
        if (r.d_f < 0) ++df_neg;
        else if (r.d_f > 0) ++df_pos;
        else ++df_zero;
        if (r.d0 < 0) ++d0_neg;
        else if (r.d0 > 0) ++d0_pos;
        else ++d0_zero;
        if (r.b_f > 1.0) ++bf_gt;
        else if (r.b_f < 1.0) ++bf_lt;
        else ++bf_eq;
    }
    const double n = static_cast<double>(reports.size());
    s.d_f = {df_neg / n, df_pos / n, df_zero / n};
    s.d0 = {d0_neg / n, d0_pos / n, d0_zero / n};
    s.b_f_gt1 = bf_gt / n;
    s.b_f_lt1 = bf_lt / n;
    s.b_f_eq1 = bf_eq / n;
    return s;
}

std::vector<HistogramRow> linear_histogram(std::span<const double> values,
                                           double lo, double hi, int bins) {
    std::vector<HistogramRow> rows(static_cast<std::size_t>(bins));
    const double width = (hi - lo) / bins;
    for (int i = 0; i < bins; ++i) {
        rows[i].lo = lo + i * width;
        rows[i].hi = lo + (i + 1) * width;
    }
    for (double v : values) {
        int idx = static_cast<int>(std::floor((v - lo) / width));
        idx = std::clamp(idx, 0, bins - 1);
        ++rows[static_cast<std::size_t>(idx)].count;
    }
    return rows;
}

std::vector<HistogramRow> log10_histogram(std::span<const double> values,
                                          double log10_lo, double log10_hi,
                                          int bins) {
    std::vector<HistogramRow> rows(static_cast<std::size_t>(bins));
    const double width = (log10_hi - log10_lo) / bins;
    for (int i = 0; i < bins; ++i) {
        rows[i].lo = std::pow(10.0, log10_lo + i * width);
        rows[i].hi = std::pow(10.0, log10_lo + (i + 1) * width);
    }
    for (double v : values) {
        const double lg = v > 0.0 ? std::log10(v) : log10_lo;
        int idx = static_cast<int>(std::floor((lg - log10_lo) / width));
        idx = std::clamp(idx, 0, bins - 1);
        ++rows[static_cast<std::size_t>(idx)].count;
    }
    return rows;
}

namespace {

void write_histogram_csv(const std::filesystem::path& path,
                         const std::vector<HistogramRow>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "bin_lo,bin_hi,count\n";
    for (const auto& r : rows) {
        out << format_real(r.lo) << ',' << format_real(r.hi) << ',' << r.count
            << '\n';
    }
}

} // namespace

void write_report_outputs(std::span<const LoadedReport> reports,
                          const std::string& out_dir, int bins) {
    const ReportSummary s = summarize_reports(reports);
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);

    {
        std::ofstream out(dir / "summary.json");
        if (!out) throw Error("cannot write summary.json");
        out << "{\"n_reports\":" << s.n_reports
            << ",\"d_f\":{\"negative\":" << format_real(s.d_f.negative)
            << ",\"positive\":" << format_real(s.d_f.positive)
            << ",\"zero\":" << format_real(s.d_f.zero) << "}"
            << ",\"b_f\":{\"gt1\":" << format_real(s.b_f_gt1)
            << ",\"lt1\":" << format_real(s.b_f_lt1)
            << ",\"eq1\":" << format_real(s.b_f_eq1) << "}"
            << ",\"d0\":{\"negative\":" << format_real(s.d0.negative)
            << ",\"positive\":" << format_real(s.d0.positive)
            << ",\"zero\":" << format_real(s.d0.zero) << "}}\n";
    }

    std::vector<double> d_f(reports.size()), d0(reports.size()), b_f(reports.size());
    std::vector<YearFractionInput> year_inputs(reports.size());
    for (std::size_t i = 0; i < reports.size(); ++i) {
        d_f[i] = reports[i].d_f;
        d0[i] = reports[i].d0;
        b_f[i] = reports[i].b_f;
        year_inputs[i] = {reports[i].year, reports[i].d0, reports[i].c_f};
    }
    write_histogram_csv(dir / "hist_d_f.csv", linear_histogram(d_f, -1.0, 1.0, bins));
    write_histogram_csv(dir / "hist_d0.csv", linear_histogram(d0, -1.0, 1.0, bins));
    write_histogram_csv(dir / "hist_b_f.csv", log10_histogram(b_f, -3.0, 6.0, bins));

    const auto unweighted = displacing_fraction_by_year(
        std::span<const YearFractionInput>(year_inputs), Weighting::Unweighted);
    const auto weighted = displacing_fraction_by_year(
        std::span<const YearFractionInput>(year_inputs), Weighting::CitationWeighted);
    std::ofstream out(dir / "displacing_fraction_by_year.csv");
    if (!out) throw Error("cannot write displacing_fraction_by_year.csv");
    out << "year,fraction,fraction_citation_weighted\n";
    for (const auto& [year, fraction] : unweighted) {
        out << year << ',' << format_real(fraction) << ','
            << format_real(weighted.at(year)) << '\n';
    }
}

} // namespace displace
