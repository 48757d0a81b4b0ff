#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace displace {

enum class PromptMode : std::uint8_t {
    ZeroShot,
    FewShot,
    ConcreteWording,
    ThreeOption,
};

std::optional<PromptMode> prompt_mode_from_string(std::string_view s);
std::string_view to_string(PromptMode m);

/// One (focal, most-cited reference) pair to classify as theory vs method
/// innovation. All four texts must be nonempty.
struct ClassificationRequest {
    std::string focal_title;
    std::string focal_abstract;
    std::string ref_title;
    std::string ref_abstract;
    PromptMode mode = PromptMode::ZeroShot;
};

/// Renders the prompt for the request's mode. Byte-stable across runs;
/// throws Error when any slot is empty.
std::string build_prompt(const ClassificationRequest& request);

/// Number of answer options offered by a mode (2, or 3 with "others").
int option_count(PromptMode mode);

struct RetryPolicy {
    int max_attempts = 3;
    int backoff_ms = 250; // doubled per attempt
};

struct EndpointConfig {
    std::string base_url; // e.g. http://127.0.0.1:8089
    std::string model;
    std::string api_key;  // sent as a bearer token when nonempty
    int timeout_sec = 120;
    RetryPolicy retry;
    std::string audit_log_path; // when nonempty, request/response JSONL audit
};

struct ClassificationResult {
    double p_theory = 0.0;  // renormalized probability of option 1
    int chosen_option = 0;  // argmax over options, 1-based
    std::vector<double> option_probs; // renormalized, index 0 = option 1
    std::map<std::string, double> raw_token_logprobs; // surface form -> logprob
    std::string model_id;
};

/// Sends one chat-completion request with logprobs enabled and extracts the
/// option-token distribution at the first generated position whose token
/// normalizes to an option number. Probabilities from all surface forms of
/// the same option are pooled before renormalization.
///
/// Throws TransportError when the endpoint stays unreachable across retries
/// and LogprobsUnavailableError when the response lacks usable logprobs
/// (there is no fallback to sampled text).
ClassificationResult classify_pair(const EndpointConfig& endpoint,
                                   const ClassificationRequest& request);

struct BatchEntry {
    std::size_t index = 0;
    bool ok = false;
    ClassificationResult result; // valid when ok
    std::string error;           // set when !ok
    bool from_journal = false;   // resumed, not re-sent
};

struct BatchOptions {
    int max_in_flight = 8;
    std::string journal_path; // empty disables journaling/resume
};

struct BatchStats {
    std::size_t completed = 0;
    std::size_t failed = 0;
    std::size_t resumed = 0;
};

/// Emitted strictly in request order, regardless of completion order.
using BatchSink = std::function<void(const BatchEntry&)>;

/// Classifies a batch with bounded concurrency. Per-request failures are
/// recorded without aborting. With a journal path, completed requests are
/// persisted as they finish and skipped on resume; a corrupt or mismatched
/// journal raises JournalError instead of resuming.
BatchStats classify_batch(const EndpointConfig& endpoint,
                          std::span<const ClassificationRequest> requests,
                          const BatchOptions& options, const BatchSink& sink);

} // namespace displace
