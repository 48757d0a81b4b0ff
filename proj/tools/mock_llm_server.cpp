// Bundled chat-completions mock endpoint for exercising `displace classify`
// without a real model server. Answers every request with a fixed option
// distribution and per-token logprobs.

#include <cmath>
#include <csignal>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

namespace {

httplib::Server* g_server = nullptr;

void handle_signal(int) {
    if (g_server) g_server->stop();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mock chat-completions endpoint with logprobs"};
    int port = 8089;
    double p_theory = 0.86;
    int options = 2;
    app.add_option("--port", port, "listen port (default 8089)");
    app.add_option("--p-theory", p_theory,
                   "probability mass on option 1 (default 0.86)");
    app.add_option("--options", options, "number of options, 2 or 3");
    CLI11_PARSE(app, argc, argv);
    if (p_theory <= 0.0 || p_theory >= 1.0 || (options != 2 && options != 3)) {
        std::cerr << "error: need 0 < p-theory < 1 and options in {2, 3}\n";
        return 1;
    }

    httplib::Server server;
    g_server = &server;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);

    server.Post("/v1/chat/completions", [&](const httplib::Request& req,
                                            httplib::Response& res) {
        std::string model = "mock-model";
        try {
            auto j = nlohmann::json::parse(req.body);
            model = j.value("model", model);
        } catch (...) {
            res.status = 400;
            res.set_content("{\"error\":\"bad request body\"}", "application/json");
            return;
        }
        const double rest = (1.0 - p_theory) / (options - 1);
        nlohmann::json top = nlohmann::json::array();
        top.push_back({{"token", "1"}, {"logprob", std::log(p_theory)}});
        top.push_back({{"token", "2"}, {"logprob", std::log(rest)}});
        if (options == 3) {
            top.push_back({{"token", "3"}, {"logprob", std::log(rest)}});
        }
        nlohmann::json body = {
            {"id", "mock-1"},
            {"object", "chat.completion"},
            {"model", model},
            {"choices",
             {{{"index", 0},
               {"finish_reason", "stop"},
               {"message", {{"role", "assistant"}, {"content", "1"}}},
               {"logprobs",
                {{"content",
                  {{{"token", "1"},
                    {"logprob", std::log(p_theory)},
                    {"top_logprobs", top}}}}}}}}},
        };
        res.set_content(body.dump(), "application/json");
    });

    std::cerr << "mock endpoint listening on 127.0.0.1:" << port << "\n";
    if (!server.listen("127.0.0.1", port)) {
        std::cerr << "error: cannot bind 127.0.0.1:" << port << "\n";
        return 1;
    }
    return 0;
}
