#include <atomic>

#include <httplib.h>

#include "crokage/engine.hpp"
#include "crokage/errors.hpp"

namespace crokage {

struct SearchServer::Impl {
    explicit Impl(const EngineHandle& e) : engine(e) {}

    const EngineHandle& engine;
    httplib::Server server;
    std::atomic<bool> running{false};
};

namespace {

void send_error(httplib::Response& res, int status, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = message;
    res.status = status;
    res.set_content(j.dump(), "application/json");
}

}  // namespace

SearchServer::SearchServer(const EngineHandle& engine) : impl_(std::make_unique<Impl>(engine)) {
    auto* impl = impl_.get();
    // no SO_REUSEPORT: a second server on a busy port must fail instead of sharing it
    impl->server.set_socket_options([](int sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    impl->server.Get("/health", [impl](const httplib::Request&, httplib::Response& res) {
        nlohmann::ordered_json j;
        j["docs"] = impl->engine.corpus().size();
        j["dim"] = impl->engine.dim();
        j["status"] = "ok";
        res.set_content(j.dump(), "application/json");
    });
    impl->server.Post("/search", [impl](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::parse_error& e) {
            send_error(res, 400, std::string("malformed JSON: ") + e.what());
            return;
        }
        try {
            auto request = QueryRequest::from_json(body);
            auto response = handle_query(impl->engine, request);
            res.set_header("X-Timings-Ms", response.timings_json().dump());
            res.set_content(response.to_json(request.include_timings).dump(), "application/json");
        } catch (const ValidationError& e) {
            send_error(res, 400, e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        }
    });
}

SearchServer::~SearchServer() { stop(); }

int SearchServer::bind(const std::string& host, int port) {
    int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound <= 0) throw ValidationError("cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void SearchServer::run() {
    impl_->running = true;
    impl_->server.listen_after_bind();
    impl_->running = false;
}

void SearchServer::stop() {
    if (impl_) impl_->server.stop();
}

bool SearchServer::running() const { return impl_->running && impl_->server.is_running(); }

}  // namespace crokage
