#include "displace/llm_classifier.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "displace/errors.hpp"
#include "displace/io_util.hpp"

namespace displace {

namespace {

constexpr const char* kZeroShotTemplate =
    "Given two papers - Paper A {focal_title} with abstract {focal_abstract}, "
    "and its primary reference Paper B {ref_title} with abstract "
    "{ref_abstract} - Paper A is better considered as (1): an innovation in "
    "'theory' (such as a different conceptual difference from its reference "
    "paper above), (2): an innovation in 'method' (such as an improvement on "
    "or formalization of the latter in mathematical frameworks)? Only give "
    "the option number.";

constexpr const char* kThreeOptionTemplate =
    "Given two papers - Paper A {focal_title} with abstract {focal_abstract}, "
    "and its primary reference Paper B {ref_title} with abstract "
    "{ref_abstract} - Paper A is better considered as (1): an innovation in "
    "'theory' (such as a different conceptual difference from its reference "
    "paper above), (2): an innovation in 'method' (such as an improvement on "
    "or formalization of the latter in mathematical frameworks), or (3) "
    "others? Only give the option number.";

constexpr const char* kConcreteTemplate =
    "For the following two papers: Paper A {focal_title}, whose abstract is "
    "{focal_abstract}, and its top reference Paper B {ref_title}, whose "
    "abstract is {ref_abstract}, Paper A is better considered as (1): an "
    "innovation in 'conceptual difference' (a different conceptual angle from "
    "its reference paper above), (2): an innovation in 'formalism difference' "
    "(an improvement on or formalization of the latter, such as in "
    "methodological or in mathematical frameworks)? Only give the option "
    "number.";

constexpr const char* kFewShotPreamble =
    "Example of \"method innovation\": [[Paper B, \"The small world problem\" "
    "by Milgram (1967), is a seminal work that introduced the concept of the "
    "\"small world problem,\" which suggests that any two people in the world "
    "are connected through a short chain of acquaintances. The paper "
    "presented empirical evidence for this phenomenon through a series of "
    "experiments. Paper A, \"Collective dynamics of 'small-world' networks\" "
    "by Watts and Strogatz (1998), builds upon Milgram's work by providing a "
    "mathematical framework to understand the small-world phenomenon. Watts "
    "and Strogatz introduced a new type of network model, known as the "
    "\"small-world network,\" which exhibits both local clustering and "
    "long-range connections. They also developed a set of mathematical tools "
    "to analyze the properties of these networks. The key innovation in "
    "Paper A is methodological refinement of the small-world concept using "
    "graph theory and network analysis. Watts and Strogatz provided a "
    "rigorous mathematical framework to study the small-world phenomenon, "
    "which was previously described only empirically by Milgram. This "
    "formalization enabled the development of new models and simulations to "
    "understand the behavior of complex networks. Therefore, Paper A is an "
    "innovation in 'method']]; Example of \"theory innovation\": [[Paper B, "
    "\"A note on the Entscheidungsproblem\" by Church focuses on the "
    "Entscheidungsproblem (decision problem) and uses a lambda calculus-based "
    "approach to show that there is no general method for determining the "
    "validity of a mathematical statement. In contrast, Paper A \"On "
    "computable numbers, with an application to the Entscheidungs problem\" "
    "by Turing introduces the concept of a machine that can perform "
    "computations. The key innovation in Paper A is a new theory of "
    "computability, which is a quite different conceptual approach from "
    "Church's approach of understanding the Entscheidungsproblem. Therefore, "
    "Paper A is an innovation in 'theory']]";

std::string fill_slots(std::string text, const ClassificationRequest& r) {
    const std::pair<std::string_view, const std::string*> slots[] = {
        {"{focal_title}", &r.focal_title},
        {"{focal_abstract}", &r.focal_abstract},
        {"{ref_title}", &r.ref_title},
        {"{ref_abstract}", &r.ref_abstract},
    };
    for (const auto& [placeholder, value] : slots) {
        auto pos = text.find(placeholder);
        while (pos != std::string::npos) {
            text.replace(pos, placeholder.size(), *value);
            pos = text.find(placeholder, pos + value->size());
        }
    }
    return text;
}

/// Strips whitespace and option punctuation so " (1)" and "1." both map to
/// the bare option digit; the tokenizer's surface form is not specified.
std::string normalize_option_token(std::string_view token) {
    std::string out;
    for (char c : token) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
        if (c == '(' || c == ')' || c == ':' || c == '.') continue;
        out.push_back(c);
    }
    return out;
}

int option_from_token(std::string_view token, int n_options) {
    const std::string norm = normalize_option_token(token);
    if (norm.size() != 1) return 0;
    const int opt = norm[0] - '0';
    return (opt >= 1 && opt <= n_options) ? opt : 0;
}

} // namespace

std::optional<PromptMode> prompt_mode_from_string(std::string_view s) {
    if (s == "zero_shot") return PromptMode::ZeroShot;
    if (s == "few_shot") return PromptMode::FewShot;
    if (s == "concrete_wording") return PromptMode::ConcreteWording;
    if (s == "three_option") return PromptMode::ThreeOption;
    return std::nullopt;
}

std::string_view to_string(PromptMode m) {
    switch (m) {
    case PromptMode::ZeroShot: return "zero_shot";
    case PromptMode::FewShot: return "few_shot";
    case PromptMode::ConcreteWording: return "concrete_wording";
    default: return "three_option";
    }
}

int option_count(PromptMode mode) {
    return mode == PromptMode::ThreeOption ? 3 : 2;
}

std::string build_prompt(const ClassificationRequest& request) {
    if (request.focal_title.empty() || request.focal_abstract.empty() ||
        request.ref_title.empty() || request.ref_abstract.empty()) {
        throw Error("classification request has an empty text slot");
    }
    switch (request.mode) {
    case PromptMode::ZeroShot:
        return fill_slots(kZeroShotTemplate, request);
    case PromptMode::ThreeOption:
        return fill_slots(kThreeOptionTemplate, request);
    case PromptMode::ConcreteWording:
        return fill_slots(kConcreteTemplate, request);
    default:
        return std::string(kFewShotPreamble) + "\n\n" +
               fill_slots(kZeroShotTemplate, request);
    }
}

namespace {

ClassificationResult extract_result(const std::string& body, int n_options,
                                    const std::string& fallback_model) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw LogprobsUnavailableError(std::string("unparseable response: ") + e.what());
    }
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
        throw LogprobsUnavailableError("response has no choices");
    }
    const auto& choice = j["choices"][0];
    if (!choice.contains("logprobs") || choice["logprobs"].is_null() ||
        !choice["logprobs"].contains("content") ||
        !choice["logprobs"]["content"].is_array()) {
        throw LogprobsUnavailableError("logprobs unavailable in response");
    }

    for (const auto& position : choice["logprobs"]["content"]) {
        const std::string sampled = position.value("token", "");
        if (option_from_token(sampled, n_options) == 0) continue;

        // Pool probability mass per option across surface forms at this
        // position, then renormalize over the options present.
        std::map<std::string, double> raw;
        std::vector<double> mass(static_cast<std::size_t>(n_options), 0.0);
        auto add = [&](const std::string& token, double logprob) {
            if (raw.count(token)) return;
            raw[token] = logprob;
            const int opt = option_from_token(token, n_options);
            if (opt > 0) mass[opt - 1] += std::exp(logprob);
        };
        add(sampled, position.value("logprob", 0.0));
        if (position.contains("top_logprobs")) {
            for (const auto& alt : position["top_logprobs"]) {
                add(alt.value("token", ""), alt.value("logprob", 0.0));
            }
        }
        double total = 0.0;
        for (double v : mass) total += v;
        if (total <= 0.0) {
            throw LogprobsUnavailableError("option tokens carry no probability mass");
        }

        ClassificationResult result;
        result.option_probs.resize(mass.size());
        for (std::size_t i = 0; i < mass.size(); ++i) {
            result.option_probs[i] = mass[i] / total;
        }
        result.p_theory = result.option_probs[0];
        result.chosen_option = static_cast<int>(
            std::max_element(result.option_probs.begin(), result.option_probs.end()) -
            result.option_probs.begin() + 1);
        result.raw_token_logprobs = std::move(raw);
        result.model_id = j.value("model", fallback_model);
        return result;
    }
    throw LogprobsUnavailableError("no generated position matches an option token");
}

std::mutex g_audit_mutex;

void audit(const std::string& path, const std::string& direction,
           const std::string& body) {
    std::lock_guard<std::mutex> lock(g_audit_mutex);
    std::ofstream out(path, std::ios::app);
    if (!out) throw Error("cannot open audit log: " + path);
    out << "{\"" << direction << "\":\"" << json_escape(body) << "\"}\n";
}

} // namespace

ClassificationResult classify_pair(const EndpointConfig& endpoint,
                                   const ClassificationRequest& request) {
    const std::string prompt = build_prompt(request);
    const int n_options = option_count(request.mode);

    nlohmann::json payload = {
        {"model", endpoint.model},
        {"messages", {{{"role", "user"}, {"content", prompt}}}},
        {"temperature", 0},
        {"max_tokens", 4},
        {"logprobs", true},
        {"top_logprobs", 10},
    };
    const std::string body = payload.dump();

    httplib::Client client(endpoint.base_url);
    client.set_connection_timeout(endpoint.timeout_sec, 0);
    client.set_read_timeout(endpoint.timeout_sec, 0);
    httplib::Headers headers;
    if (!endpoint.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + endpoint.api_key);
    }

    if (!endpoint.audit_log_path.empty()) {
        audit(endpoint.audit_log_path, "request", body);
    }

    std::string last_error;
    int backoff = endpoint.retry.backoff_ms;
    const int attempts = std::max(1, endpoint.retry.max_attempts);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff *= 2;
        }
        auto res = client.Post("/v1/chat/completions", headers, body,
                               "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "server status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw TransportError("endpoint returned status " +
                                 std::to_string(res->status));
        }
        if (!endpoint.audit_log_path.empty()) {
            audit(endpoint.audit_log_path, "response", res->body);
        }
        return extract_result(res->body, n_options, endpoint.model);
    }
    throw TransportError("endpoint unreachable after " + std::to_string(attempts) +
                         " attempts: " + last_error);
}

namespace {

std::uint64_t batch_checksum(std::span<const ClassificationRequest> requests) {
    std::uint64_t h = 14695981039346656037ull;
    for (const auto& r : requests) {
        h = fnv1a64(build_prompt(r), h);
        h = fnv1a64(to_string(r.mode), h);
    }
    return h;
}

std::string entry_to_json(const BatchEntry& e) {
    std::string out = "{\"index\":" + std::to_string(e.index);
    if (e.ok) {
        out += ",\"ok\":true,\"p_theory\":" + format_real(e.result.p_theory);
        out += ",\"chosen_option\":" + std::to_string(e.result.chosen_option);
        out += ",\"option_probs\":[";
        for (std::size_t i = 0; i < e.result.option_probs.size(); ++i) {
            if (i) out += ',';
            out += format_real(e.result.option_probs[i]);
        }
        out += "],\"model_id\":\"" + json_escape(e.result.model_id) + "\"";
        out += ",\"raw_token_logprobs\":{";
        bool first = true;
        for (const auto& [token, lp] : e.result.raw_token_logprobs) {
            if (!first) out += ',';
            first = false;
            out += "\"" + json_escape(token) + "\":" + format_real(lp);
        }
        out += "}";
    } else {
        out += ",\"ok\":false,\"error\":\"" + json_escape(e.error) + "\"";
    }
    out += "}";
    return out;
}

BatchEntry entry_from_json(const nlohmann::json& j) {
    BatchEntry e;
    e.index = j.at("index").get<std::size_t>();
    e.ok = j.at("ok").get<bool>();
    e.from_journal = true;
    if (e.ok) {
        e.result.p_theory = j.at("p_theory").get<double>();
        e.result.chosen_option = j.at("chosen_option").get<int>();
        for (const auto& p : j.at("option_probs")) {
            e.result.option_probs.push_back(p.get<double>());
        }
        e.result.model_id = j.at("model_id").get<std::string>();
        for (const auto& [token, lp] : j.at("raw_token_logprobs").items()) {
            e.result.raw_token_logprobs[token] = lp.get<double>();
        }
    } else {
        e.error = j.at("error").get<std::string>();
    }
    return e;
}

} // namespace

BatchStats classify_batch(const EndpointConfig& endpoint,
                          std::span<const ClassificationRequest> requests,
                          const BatchOptions& options, const BatchSink& sink) {
    const std::size_t n = requests.size();
    std::vector<std::optional<BatchEntry>> done(n);
    BatchStats stats;

    const bool journaling = !options.journal_path.empty();
    const std::uint64_t checksum = journaling ? batch_checksum(requests) : 0;

    std::ofstream journal;
    if (journaling) {
        std::ifstream existing(options.journal_path);
        if (existing) {
            std::string line;
            std::size_t line_no = 0;
            bool saw_header = false;
            while (std::getline(existing, line)) {
                ++line_no;
                if (line.empty()) continue;
                nlohmann::json j;
                try {
                    j = nlohmann::json::parse(line);
                    if (line_no == 1) {
                        if (j.at("journal_version").get<int>() != 1 ||
                            j.at("n_requests").get<std::size_t>() != n ||
                            j.at("requests_fnv").get<std::string>() != to_hex(checksum)) {
                            throw JournalError(
                                "journal does not match this request batch; "
                                "restart explicitly by removing it");
                        }
                        saw_header = true;
                        continue;
                    }
                    BatchEntry e = entry_from_json(j);
                    if (e.index >= n || done[e.index]) {
                        throw JournalError("journal entry index out of range or repeated");
                    }
                    done[e.index] = std::move(e);
                    ++stats.resumed;
                } catch (const JournalError&) {
                    throw;
                } catch (const std::exception& ex) {
                    throw JournalError(std::string("corrupt journal line ") +
                                       std::to_string(line_no) + ": " + ex.what() +
                                       "; refusing to resume");
                }
            }
            if (line_no > 0 && !saw_header) {
                throw JournalError("journal missing header; refusing to resume");
            }
        }
        existing.close();

        journal.open(options.journal_path, std::ios::app);
        if (!journal) throw Error("cannot open journal: " + options.journal_path);
        if (stats.resumed == 0) {
            std::ifstream recheck(options.journal_path);
            recheck.seekg(0, std::ios::end);
            if (recheck.tellg() == 0) {
                journal << "{\"journal_version\":1,\"n_requests\":" << n
                        << ",\"requests_fnv\":\"" << to_hex(checksum) << "\"}\n";
                journal.flush();
            }
        }
    }

    std::mutex mu;
    std::condition_variable cv;
    std::size_t next_to_emit = 0;
    std::atomic<std::size_t> next_index{0};

    auto flush_ready = [&]() { // holds mu
        while (next_to_emit < n && done[next_to_emit]) {
            const BatchEntry& e = *done[next_to_emit];
            if (e.ok) {
                ++stats.completed;
            } else {
                ++stats.failed;
            }
            if (sink) sink(e);
            ++next_to_emit;
        }
    };

    {
        std::lock_guard<std::mutex> lock(mu);
        flush_ready();
    }

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next_index.fetch_add(1);
            if (i >= n) return;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (done[i]) continue; // resumed from journal
            }
            BatchEntry entry;
            entry.index = i;
            try {
                entry.result = classify_pair(endpoint, requests[i]);
                entry.ok = true;
            } catch (const std::exception& ex) {
                entry.ok = false;
                entry.error = ex.what();
            }
            std::lock_guard<std::mutex> lock(mu);
            if (journaling) {
                journal << entry_to_json(entry) << "\n";
                journal.flush();
            }
            done[i] = std::move(entry);
            flush_ready();
        }
    };

    const int n_workers = std::max(1, options.max_in_flight);
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers));
    for (int t = 0; t < n_workers; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    return stats;
}

} // namespace displace
