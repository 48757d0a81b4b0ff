#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// End-to-end checks through the installed binary: exit codes, output
// determinism, manifests, and the ingest -> metrics -> report chain.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "fixtures.hpp"
#include "mock_llm.hpp"

namespace {

const std::string kBin = DISPLACE_BIN_PATH;

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
};

RunResult run(const std::string& args, const testsupport::TempDir& dir,
              const std::string& tag) {
    const std::string out_path = dir.file("stdout_" + tag);
    const std::string err_path = dir.file("stderr_" + tag);
    const std::string cmd =
        kBin + " " + args + " > " + out_path + " 2> " + err_path;
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(raw);
    std::ifstream in(out_path);
    std::stringstream ss;
    ss << in.rdbuf();
    r.stdout_text = ss.str();
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_fixture_corpus(const testsupport::TempDir& dir) {
    std::ofstream papers(dir.file("papers.jsonl"));
    papers << R"({"id":"R1","year":1990,"doc_type":"journal-article","fields":[1,2]})" << "\n"
           << R"({"id":"R2","year":1991,"doc_type":"journal-article","fields":[3]})" << "\n"
           << R"({"id":"F","year":2000,"doc_type":"journal-article","fields":[1]})" << "\n"
           << R"({"id":"A","year":2005,"doc_type":"journal-article","fields":[2]})" << "\n"
           << R"({"id":"B","year":2006,"doc_type":"journal-article","fields":[1]})" << "\n"
           << R"({"id":"C","year":2007,"doc_type":"journal-article","fields":[2]})" << "\n"
           << R"({"id":"D","year":2008,"doc_type":"journal-article","fields":[3]})" << "\n"
           << R"({"id":"BOOK","year":1980,"doc_type":"book","fields":[1]})" << "\n";
    std::ofstream edges(dir.file("edges.tsv"));
    edges << "F\tR1\nF\tR2\nA\tF\nB\tF\nB\tR1\nC\tR1\nD\tR2\nF\tBOOK\nA\tF\n";
}

} // namespace

TEST_CASE("--version prints tool and snapshot versions") {
    testsupport::TempDir dir("cli_version");
    auto r = run("--version", dir, "v");
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("displace") != std::string::npos);
    CHECK(r.stdout_text.find("snapshot format 1") != std::string::npos);
}

TEST_CASE("unknown flags and missing files exit nonzero") {
    testsupport::TempDir dir("cli_err");
    CHECK(run("frobnicate", dir, "a").exit_code != 0);
    CHECK(run("metrics --snapshot " + dir.file("absent.snap") + " --out " +
                  dir.file("r.jsonl"),
              dir, "b").exit_code != 0);
    CHECK(run("distfit --input nope.csv --truncation 2 --out " + dir.file("f.json"),
              dir, "c").exit_code != 0);
    // --truncation is required, with no silent default
    std::ofstream h(dir.file("h.csv"));
    h << "size,count\n2,20\n3,10\n4,5\n5,2\n6,1\n";
    h.close();
    CHECK(run("distfit --input " + dir.file("h.csv") + " --out " + dir.file("f.json"),
              dir, "d").exit_code != 0);
}

TEST_CASE("ingest -> metrics -> report pipeline on the small fixture") {
    testsupport::TempDir dir("cli_pipe");
    write_fixture_corpus(dir);

    auto ing = run("ingest --papers " + dir.file("papers.jsonl") + " --edges " +
                       dir.file("edges.tsv") + " --out " + dir.file("g.snap"),
                   dir, "ingest");
    REQUIRE(ing.exit_code == 0);
    CHECK(slurp(dir.file("g.snap.manifest.json")).find("\"subcommand\":\"ingest\"") !=
          std::string::npos);

    auto met = run("metrics --snapshot " + dir.file("g.snap") + " --out " +
                       dir.file("reports.jsonl"),
                   dir, "metrics");
    REQUIRE(met.exit_code == 0);

    // Only F is eligible (references and citers); its report matches the
    // hand-computed decomposition.
    const std::string reports = slurp(dir.file("reports.jsonl"));
    auto j = nlohmann::json::parse(reports.substr(0, reports.find('\n')));
    CHECK(j.at("id") == "F");
    CHECK(j.at("n_i") == 1);
    CHECK(j.at("n_j") == 1);
    CHECK(j.at("n_k") == 2);
    CHECK(j.at("d0") == 0.0);
    CHECK(j.at("c_f") == 2);
    CHECK(j.at("c_max") == 3);
    CHECK(j.at("b_f") == 1.5);
    CHECK(j.at("top_reference") == "R1");

    auto rep = run("report --reports " + dir.file("reports.jsonl") + " --out-dir " +
                       dir.file("report_out"),
                   dir, "report");
    REQUIRE(rep.exit_code == 0);
    auto summary = nlohmann::json::parse(
        slurp(dir.file("report_out") + "/summary.json"));
    CHECK(summary.at("n_reports") == 1);
    CHECK(summary.at("d_f").at("zero") == 1.0);
    CHECK(slurp(dir.file("report_out") + "/displacing_fraction_by_year.csv")
              .find("year,fraction") == 0);
}

TEST_CASE("metrics output is byte-identical across runs and thread counts") {
    testsupport::TempDir dir("cli_det");
    write_fixture_corpus(dir);
    REQUIRE(run("ingest --papers " + dir.file("papers.jsonl") + " --edges " +
                    dir.file("edges.tsv") + " --out " + dir.file("g.snap"),
                dir, "ingest").exit_code == 0);
    REQUIRE(run("metrics --snapshot " + dir.file("g.snap") + " --threads 1 --out " +
                    dir.file("r1.jsonl"),
                dir, "m1").exit_code == 0);
    REQUIRE(run("metrics --snapshot " + dir.file("g.snap") + " --threads 8 --out " +
                    dir.file("r8.jsonl"),
                dir, "m8").exit_code == 0);
    REQUIRE(run("metrics --snapshot " + dir.file("g.snap") + " --threads 8 --out " +
                    dir.file("r8b.jsonl"),
                dir, "m8b").exit_code == 0);
    const auto bytes = slurp(dir.file("r1.jsonl"));
    CHECK(!bytes.empty());
    CHECK(bytes == slurp(dir.file("r8.jsonl")));
    CHECK(bytes == slurp(dir.file("r8b.jsonl")));
}

TEST_CASE("metrics --variant d0 leaves the other variants null") {
    testsupport::TempDir dir("cli_variant");
    write_fixture_corpus(dir);
    REQUIRE(run("ingest --papers " + dir.file("papers.jsonl") + " --edges " +
                    dir.file("edges.tsv") + " --out " + dir.file("g.snap"),
                dir, "ingest").exit_code == 0);
    REQUIRE(run("metrics --snapshot " + dir.file("g.snap") + " --variant d0 --out " +
                    dir.file("r.jsonl"),
                dir, "m").exit_code == 0);
    const std::string reports = slurp(dir.file("r.jsonl"));
    auto j = nlohmann::json::parse(reports.substr(0, reports.find('\n')));
    CHECK(j.at("d1").is_null());
    CHECK(j.at("d2").is_null());
    CHECK(j.at("d3").is_null());
    CHECK(j.at("d4").is_null());
    CHECK_FALSE(j.at("d0").is_null());
}

TEST_CASE("metrics flags change the classification the way they say") {
    testsupport::TempDir dir("cli_flags");
    // The fixture corpus plus a pre-focal citer of R1 and a third,
    // once-cited reference.
    write_fixture_corpus(dir);
    {
        std::ofstream papers(dir.file("papers.jsonl"), std::ios::app);
        papers << R"({"id":"E","year":1995,"doc_type":"journal-article","fields":[1]})" << "\n"
               << R"({"id":"R3","year":1992,"doc_type":"journal-article","fields":[2]})" << "\n";
        std::ofstream edges(dir.file("edges.tsv"), std::ios::app);
        edges << "E\tR1\nF\tR3\n";
    }
    REQUIRE(run("ingest --papers " + dir.file("papers.jsonl") + " --edges " +
                    dir.file("edges.tsv") + " --out " + dir.file("g.snap"),
                dir, "ingest").exit_code == 0);

    auto first_report = [&](const std::string& name) {
        const std::string text = slurp(dir.file(name));
        return nlohmann::json::parse(text.substr(0, text.find('\n')));
    };

    REQUIRE(run("metrics --snapshot " + dir.file("g.snap") + " --out " +
                    dir.file("default.jsonl"),
                dir, "m_default").exit_code == 0);
    auto def = first_report("default.jsonl");
    CHECK(def.at("n_k") == 2);
    CHECK(def.at("c_max") == 4); // R1: F, B, C, E

    // Without the time filter, E(1995) joins the k-citers of F(2000).
    REQUIRE(run("metrics --snapshot " + dir.file("g.snap") +
                    " --no-time-filter --out " + dir.file("notf.jsonl"),
                dir, "m_notf").exit_code == 0);
    CHECK(first_report("notf.jsonl").at("n_k") == 3);

    // Post-focal counting drops E from c_max.
    REQUIRE(run("metrics --snapshot " + dir.file("g.snap") +
                    " --cmax-post-focal-only --out " + dir.file("postf.jsonl"),
                dir, "m_postf").exit_code == 0);
    CHECK(first_report("postf.jsonl").at("c_max") == 3);

    // Quartile mode: citation counts among cited papers are {4 (R1), 2 (R2),
    // 2 (F), 1 (R3)}, so the 75th-percentile floor is 2. Only R1 keeps 2+
    // citations besides the focal's, D (-> R2 only) stops being k-type, and
    // D2 = (1 - 1)/(1 + 1 + 1) = 0.
    REQUIRE(run("metrics --snapshot " + dir.file("g.snap") +
                    " --popular-quartile --out " + dir.file("quart.jsonl"),
                dir, "m_quart").exit_code == 0);
    auto quart = first_report("quart.jsonl");
    CHECK(quart.at("d2").get<double>() == doctest::Approx(0.0));
    // The default floor of 24 leaves no popular references: every citer of F
    // counts as i-type and D2 = 1.
    CHECK(def.at("d2").get<double>() == doctest::Approx(1.0));
}

TEST_CASE("zipf subcommand is reproducible for a fixed seed") {
    testsupport::TempDir dir("cli_zipf");
    // Corpus where papers have >= 3 references with distinct citation counts.
    std::ofstream papers(dir.file("papers.jsonl"));
    std::ofstream edges(dir.file("edges.tsv"));
    for (int r = 0; r < 6; ++r) {
        papers << R"({"id":"ref)" << r << R"(","year":1950,"doc_type":"journal-article"})" << "\n";
    }
    for (int f = 0; f < 12; ++f) {
        papers << R"({"id":"f)" << f << R"(","year":1990,"doc_type":"journal-article"})" << "\n";
        for (int r = 0; r <= 2 + f % 3; ++r) {
            edges << "f" << f << "\tref" << r << "\n";
        }
    }
    for (int c = 0; c < 8; ++c) {
        papers << R"({"id":"c)" << c << R"(","year":2000,"doc_type":"journal-article"})" << "\n";
        for (int r = 0; r <= c % 4; ++r) edges << "c" << c << "\tref" << r << "\n";
    }
    papers.close();
    edges.close();

    REQUIRE(run("ingest --papers " + dir.file("papers.jsonl") + " --edges " +
                    dir.file("edges.tsv") + " --out " + dir.file("g.snap"),
                dir, "ingest").exit_code == 0);
    REQUIRE(run("zipf --snapshot " + dir.file("g.snap") +
                    " --sample 5 --seed 7 --out " + dir.file("z1.csv"),
                dir, "z1").exit_code == 0);
    REQUIRE(run("zipf --snapshot " + dir.file("g.snap") +
                    " --sample 5 --seed 7 --out " + dir.file("z2.csv"),
                dir, "z2").exit_code == 0);
    const auto bytes = slurp(dir.file("z1.csv"));
    CHECK(bytes == slurp(dir.file("z2.csv")));
    CHECK(bytes.find("paper_id,a,b,c,r2_log,ratio_empirical,ratio_theoretical") == 0);
}

TEST_CASE("multiples and distfit chain through CSV files") {
    testsupport::TempDir dir("cli_pools");
    std::ofstream papers(dir.file("papers.jsonl"));
    std::ofstream edges(dir.file("edges.tsv"));
    // Three anchors with pools of sizes 3, 2, 2.
    const int sizes[] = {3, 2, 2};
    for (int a = 0; a < 3; ++a) {
        papers << R"({"id":"anchor)" << a << R"(","year":1950,"doc_type":"journal-article"})" << "\n";
        for (int m = 0; m < sizes[a]; ++m) {
            const std::string member = "m" + std::to_string(a) + "_" + std::to_string(m);
            papers << R"({"id":")" << member << R"(","year":1980,"doc_type":"journal-article"})" << "\n";
            edges << member << "\tanchor" << a << "\n";
            for (int c = 0; c < 4; ++c) {
                const std::string citer = member + "_c" + std::to_string(c);
                papers << R"({"id":")" << citer << R"(","year":1990,"doc_type":"journal-article"})" << "\n";
                edges << citer << "\t" << member << "\n";
            }
        }
    }
    papers.close();
    edges.close();

    REQUIRE(run("ingest --papers " + dir.file("papers.jsonl") + " --edges " +
                    dir.file("edges.tsv") + " --out " + dir.file("g.snap"),
                dir, "ingest").exit_code == 0);
    REQUIRE(run("multiples --snapshot " + dir.file("g.snap") +
                    " --min-citations 4 --min-d 0.2 --min-pool-size 2 --out " +
                    dir.file("pools.csv") + " --histogram " + dir.file("hist.csv"),
                dir, "pools").exit_code == 0);

    const auto pools = slurp(dir.file("pools.csv"));
    CHECK(pools.find("anchor_id,size,member_ids,min_year,max_year") == 0);
    CHECK(pools.find("anchor0,3,m0_0;m0_1;m0_2,1980,1980") != std::string::npos);
    const auto hist = slurp(dir.file("hist.csv"));
    CHECK(hist.find("2,2") != std::string::npos);
    CHECK(hist.find("3,1") != std::string::npos);
}

TEST_CASE("report subcommand rejects empty input") {
    testsupport::TempDir dir("cli_report_empty");
    { std::ofstream out(dir.file("empty.jsonl")); }
    auto r = run("report --reports " + dir.file("empty.jsonl") + " --out-dir " +
                     dir.file("out"),
                 dir, "r");
    CHECK(r.exit_code != 0);
}

TEST_CASE("classify subcommand runs against a live mock endpoint") {
    testsupport::TempDir dir("cli_classify");
    testsupport::MockLlmServer server;
    server.set_default({{{"1", std::log(0.86)}, {"2", std::log(0.14)}}});

    {
        std::ofstream pairs(dir.file("pairs.jsonl"));
        pairs << R"({"id":"wc53","focal_title":"Focal one","focal_abstract":"Abstract one.","ref_title":"Ref one","ref_abstract":"Ref abstract one."})" << "\n"
              << R"({"id":"tm37","focal_title":"Focal two","focal_abstract":"Abstract two.","ref_title":"Ref two","ref_abstract":"Ref abstract two."})" << "\n";
    }
    auto r = run("classify --endpoint " + server.base_url() +
                     " --model mock-model --pairs " + dir.file("pairs.jsonl") +
                     " --mode zero_shot --max-in-flight 2 --out " +
                     dir.file("results.jsonl"),
                 dir, "classify");
    REQUIRE(r.exit_code == 0);

    std::ifstream results(dir.file("results.jsonl"));
    std::string line;
    std::vector<nlohmann::json> rows;
    while (std::getline(results, line)) {
        if (!line.empty()) rows.push_back(nlohmann::json::parse(line));
    }
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].at("index") == 0);
    CHECK(rows[0].at("id") == "wc53");
    CHECK(rows[0].at("ok") == true);
    CHECK(rows[0].at("p_theory").get<double>() == doctest::Approx(0.86).epsilon(1e-12));
    CHECK(rows[1].at("id") == "tm37");
    CHECK(std::filesystem::exists(dir.file("results.jsonl.journal")));
    CHECK(std::filesystem::exists(dir.file("results.jsonl.manifest.json")));

    // Re-run: everything resumes from the journal; the endpoint is not hit.
    const auto before = server.request_count();
    auto again = run("classify --endpoint " + server.base_url() +
                         " --model mock-model --pairs " + dir.file("pairs.jsonl") +
                         " --mode zero_shot --out " + dir.file("results.jsonl"),
                     dir, "classify2");
    CHECK(again.exit_code == 0);
    CHECK(server.request_count() == before);
}

TEST_CASE("overlap subcommand reports the exact null and the empirical rate") {
    testsupport::TempDir dir("cli_overlap");
    write_fixture_corpus(dir);
    REQUIRE(run("ingest --papers " + dir.file("papers.jsonl") + " --edges " +
                    dir.file("edges.tsv") + " --out " + dir.file("g.snap"),
                dir, "ingest").exit_code == 0);
    // F's fields {1} and R1's fields {1,2} intersect; D0(F) = 0, so use a
    // cutoff below it.
    REQUIRE(run("overlap --snapshot " + dir.file("g.snap") +
                    " --d-cutoff -0.5 --out " + dir.file("o.json"),
                dir, "ov").exit_code == 0);
    auto j = nlohmann::json::parse(slurp(dir.file("o.json")));
    CHECK(j.at("n_pairs") == 1);
    CHECK(j.at("p_empirical") == 1.0);
    CHECK(j.at("p_null").get<double>() == doctest::Approx(0.013675092971802));
}
