#include "starwm/predictors.hpp"

#include <cmath>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "starwm/codec.hpp"
#include "starwm/parallel.hpp"
#include "starwm/prompts.hpp"

namespace starwm {

using nlohmann::json;

std::string_view to_string(PredictionError::Kind kind) {
    switch (kind) {
        case PredictionError::Kind::Timeout: return "Timeout";
        case PredictionError::Kind::HttpError: return "HttpError";
        case PredictionError::Kind::UnparseableReply: return "UnparseableReply";
    }
    return "Unknown";
}

Observation predict_static_bias(const PredictionRequest& req, bool strict_copy) {
    if (req.horizon_s < 1) throw std::invalid_argument("horizon_s must be at least 1");
    Observation out = req.start_obs;
    if (!strict_copy) out.time_s += req.horizon_s;
    return out;
}

Observation predict_rule_sim(const PredictionRequest& req, const SimConfig& cfg) {
    return simulate(req.start_obs, req.actions, req.horizon_s, cfg);
}

void RemoteConfig::check() const {
    if (max_retries < 0) throw std::invalid_argument("max_retries must be nonnegative");
    if (max_in_flight < 1) throw std::invalid_argument("max_in_flight must be at least 1");
    if (!(timeout_s > 0.0)) throw std::invalid_argument("timeout_s must be positive");
}

namespace {

void split_endpoint(const std::string& url, std::string& origin, std::string& path) {
    const std::string scheme = "http://";
    if (url.rfind(scheme, 0) != 0) throw std::invalid_argument("endpoint must be an http:// URL: " + url);
    const size_t slash = url.find('/', scheme.size());
    origin = url.substr(0, slash);
    path = slash == std::string::npos ? "/" : url.substr(slash);
}

}  // namespace

ChatClient::ChatClient(RemoteConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.check();
    split_endpoint(cfg_.endpoint, origin_, path_);
}

std::string ChatClient::request_body(const std::vector<ChatMessage>& messages) const {
    nlohmann::ordered_json body;
    body["model"] = cfg_.model;
    body["messages"] = json::array();
    for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    body["temperature"] = cfg_.temperature;
    return body.dump();
}

std::string ChatClient::complete(const std::vector<ChatMessage>& messages) const {
    httplib::Client cli(origin_);
    const auto secs = static_cast<time_t>(cfg_.timeout_s);
    const auto usecs = static_cast<time_t>(std::lround((cfg_.timeout_s - static_cast<double>(secs)) * 1e6));
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);

    httplib::Headers headers;
    if (!cfg_.auth_env.empty()) {
        if (const char* token = std::getenv(cfg_.auth_env.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
    }
    auto res = cli.Post(path_, headers, request_body(messages), "application/json");
    if (!res) {
        const auto err = res.error();
        const std::string what = "request to " + cfg_.endpoint + " failed: " + httplib::to_string(err);
        if (err == httplib::Error::Read || err == httplib::Error::Write || err == httplib::Error::ConnectionTimeout) {
            throw PredictionError(PredictionError::Kind::Timeout, what);
        }
        throw PredictionError(PredictionError::Kind::HttpError, what, 0);
    }
    if (res->status < 200 || res->status >= 300) {
        throw PredictionError(PredictionError::Kind::HttpError,
                              "endpoint answered HTTP " + std::to_string(res->status), res->status, res->body);
    }
    try {
        const json j = json::parse(res->body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw PredictionError(PredictionError::Kind::UnparseableReply,
                              std::string("not a chat completion: ") + e.what(), res->status, res->body);
    }
}

bool retryable(const PredictionError& e) {
    switch (e.kind()) {
        case PredictionError::Kind::Timeout:
        case PredictionError::Kind::UnparseableReply: return true;
        case PredictionError::Kind::HttpError: return e.status() == 0 || e.status() == 429 || e.status() >= 500;
    }
    return false;
}

RemotePredictor::RemotePredictor(RemoteConfig cfg)
    : client_(std::move(cfg)), slots_(std::make_unique<std::counting_semaphore<>>(client_.config().max_in_flight)) {}

std::string RemotePredictor::render_prompt(const PredictionRequest& req) const {
    return render_world_model_prompt(req.player_id, req.horizon_s, serialize_observation(req.start_obs),
                                     format_actions(req.actions), client_.config().no_think);
}

Observation RemotePredictor::predict(const PredictionRequest& req) {
    const std::vector<ChatMessage> messages = {{"user", render_prompt(req)}};
    const int attempts = client_.config().max_retries + 1;
    for (int attempt = 1;; ++attempt) {
        try {
            std::string reply;
            {
                slots_->acquire();
                struct Release {
                    std::counting_semaphore<>* s;
                    ~Release() { s->release(); }
                } release{slots_.get()};
                reply = client_.complete(messages);
            }
            const std::string body = strip_think_block(reply);
            try {
                return parse_observation(body);
            } catch (const ParseError& e) {
                throw PredictionError(PredictionError::Kind::UnparseableReply,
                                      std::string("reply is not an observation: ") + e.what(), 200, reply);
            }
        } catch (const PredictionError& e) {
            if (attempt >= attempts || !retryable(e)) throw;
        }
    }
}

std::vector<BatchResult> RemotePredictor::predict_batch(const std::vector<PredictionRequest>& reqs,
                                                        unsigned threads) {
    std::vector<BatchResult> out(reqs.size());
    parallel_for(reqs.size(), threads, [&](size_t i) {
        out[i].index = i;
        try {
            out[i].obs = predict(reqs[i]);
        } catch (const PredictionError& e) {
            out[i].error = e;
        }
    });
    return out;
}

std::unique_ptr<Predictor> make_predictor(const std::string& backend, const SimConfig& sim,
                                          const RemoteConfig& remote) {
    if (backend == "static") return std::make_unique<StaticBiasPredictor>();
    if (backend == "static-strict") return std::make_unique<StaticBiasPredictor>(true);
    if (backend == "rulesim") return std::make_unique<RuleSimPredictor>(sim);
    if (backend == "remote") return std::make_unique<RemotePredictor>(remote);
    throw std::invalid_argument("unknown predictor backend: " + backend);
}

}  // namespace starwm
