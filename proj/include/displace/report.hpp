#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "displace/displacement.hpp"

namespace displace {

/// Writes one JSON object per report with external ids and reals at 12
/// significant digits, in a fixed field order (byte-stable across runs and
/// thread counts).
void write_reports_jsonl(std::ostream& out, const CitationGraph& graph,
                         std::span<const DisplacementReport> reports);

/// The subset of report fields the summary pipeline consumes.
struct LoadedReport {
    std::string id;
    int year = 0;
    double d0 = 0.0;
    double d_f = 0.0;
    double b_f = 0.0;
    std::uint64_t c_f = 0;
};

/// Parses reports.jsonl back. Malformed lines raise ParseError with the line
/// number.
std::vector<LoadedReport> load_reports_jsonl(std::istream& in);

struct SignFractions {
    double negative = 0.0;
    double positive = 0.0;
    double zero = 0.0;
};

struct ReportSummary {
    std::uint64_t n_reports = 0;
    SignFractions d_f;
    SignFractions d0;
    double b_f_gt1 = 0.0;
    double b_f_lt1 = 0.0;
    double b_f_eq1 = 0.0;
};

/// Sign-fraction summary over loaded reports. Throws Error on empty input.
ReportSummary summarize_reports(std::span<const LoadedReport> reports);

struct HistogramRow {
    double lo = 0.0;
    double hi = 0.0;
    std::uint64_t count = 0;
};

/// Linear bins over [lo, hi]; values outside are clamped into the end bins.
std::vector<HistogramRow> linear_histogram(std::span<const double> values,
                                           double lo, double hi, int bins);

/// Log10 bins, for the burden-factor distribution.
std::vector<HistogramRow> log10_histogram(std::span<const double> values,
                                          double log10_lo, double log10_hi,
                                          int bins);

/// Emits summary.json, the three metric histograms, and the per-year
/// displacing-fraction table under `out_dir`.
void write_report_outputs(std::span<const LoadedReport> reports,
                          const std::string& out_dir, int bins);

} // namespace displace
