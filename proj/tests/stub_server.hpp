#pragma once

#include <httplib.h>

#include <atomic>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

namespace starwm::test {

/// Chat-completions envelope around one reply.
inline std::string chat_envelope(const std::string& content) {
    nlohmann::json j;
    j["choices"] = nlohmann::json::array({{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}}});
    return j.dump();
}

/// Local HTTP server on an ephemeral port. The handler sees every POST to /v1/chat/completions
/// along with its 1-based arrival number; bodies, headers and peak concurrency are recorded.
class StubServer {
public:
    using Handler = std::function<void(const httplib::Request&, httplib::Response&, int call)>;

    explicit StubServer(Handler handler, int pool = 32) : handler_(std::move(handler)) {
        server_.new_task_queue = [pool] { return new httplib::ThreadPool(static_cast<size_t>(pool)); };
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            const int now = ++in_flight_;
            int peak = peak_.load();
            while (now > peak && !peak_.compare_exchange_weak(peak, now)) {}
            int call = 0;
            {
                std::lock_guard<std::mutex> lock(mu_);
                bodies_.push_back(req.body);
                auth_.push_back(req.get_header_value("Authorization"));
                call = static_cast<int>(bodies_.size());
            }
            handler_(req, res, call);
            --in_flight_;
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        if (port_ <= 0) throw std::runtime_error("stub server could not bind");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubServer() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    StubServer(const StubServer&) = delete;
    StubServer& operator=(const StubServer&) = delete;

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

    int calls() const {
        std::lock_guard<std::mutex> lock(mu_);
        return static_cast<int>(bodies_.size());
    }
    std::vector<std::string> bodies() const {
        std::lock_guard<std::mutex> lock(mu_);
        return bodies_;
    }
    std::vector<std::string> auth_headers() const {
        std::lock_guard<std::mutex> lock(mu_);
        return auth_;
    }
    int peak_in_flight() const { return peak_.load(); }

private:
    Handler handler_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> in_flight_{0};
    std::atomic<int> peak_{0};
    mutable std::mutex mu_;
    std::vector<std::string> bodies_;
    std::vector<std::string> auth_;
};

}  // namespace starwm::test
