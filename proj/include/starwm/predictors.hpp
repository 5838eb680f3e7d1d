#pragma once

#include <memory>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <vector>

#include "starwm/observation.hpp"
#include "starwm/rule_sim.hpp"

namespace starwm {

struct PredictionRequest {
    Observation start_obs;
    std::vector<TimedAction> actions;
    int horizon_s = 5;
    int player_id = 1;
};

class PredictionError : public std::runtime_error {
public:
    enum class Kind { Timeout, HttpError, UnparseableReply };

    PredictionError(Kind kind, const std::string& what, int status = 0, std::string raw = {})
        : std::runtime_error(what), kind_(kind), status_(status), raw_(std::move(raw)) {}

    Kind kind() const noexcept { return kind_; }
    /// HTTP status for HttpError; 0 when the connection itself failed.
    int status() const noexcept { return status_; }
    /// Reply text for UnparseableReply.
    const std::string& raw() const noexcept { return raw_; }

private:
    Kind kind_;
    int status_;
    std::string raw_;
};

std::string_view to_string(PredictionError::Kind kind);

class Predictor {
public:
    virtual ~Predictor() = default;
    virtual Observation predict(const PredictionRequest& req) = 0;
    virtual std::string name() const = 0;
};

/// The input observation with its clock advanced by the horizon (left untouched in strict mode).
Observation predict_static_bias(const PredictionRequest& req, bool strict_copy = false);
Observation predict_rule_sim(const PredictionRequest& req, const SimConfig& cfg);

class StaticBiasPredictor : public Predictor {
public:
    explicit StaticBiasPredictor(bool strict_copy = false) : strict_copy_(strict_copy) {}
    Observation predict(const PredictionRequest& req) override { return predict_static_bias(req, strict_copy_); }
    std::string name() const override { return "static"; }

private:
    bool strict_copy_;
};

class RuleSimPredictor : public Predictor {
public:
    explicit RuleSimPredictor(SimConfig cfg = {}) : cfg_(std::move(cfg)) {}
    Observation predict(const PredictionRequest& req) override { return predict_rule_sim(req, cfg_); }
    std::string name() const override { return "rulesim"; }

private:
    SimConfig cfg_;
};

struct RemoteConfig {
    /// http://host[:port]/path of an OpenAI-style chat completions route.
    std::string endpoint = "http://127.0.0.1:8000/v1/chat/completions";
    std::string model = "starwm";
    /// Environment variable holding the bearer token; empty sends no Authorization header.
    std::string auth_env;
    double timeout_s = 60.0;
    int max_retries = 2;
    int max_in_flight = 4;
    double temperature = 0.0;
    bool no_think = true;

    void check() const;
};

struct ChatMessage {
    std::string role;
    std::string content;
};

/// One chat-completion exchange per call; no retries at this level.
class ChatClient {
public:
    explicit ChatClient(RemoteConfig cfg);

    std::string request_body(const std::vector<ChatMessage>& messages) const;
    /// Returns choices[0].message.content. Throws PredictionError (Timeout or HttpError),
    /// or UnparseableReply when the response envelope is not a chat completion.
    std::string complete(const std::vector<ChatMessage>& messages) const;

    const RemoteConfig& config() const noexcept { return cfg_; }

private:
    RemoteConfig cfg_;
    std::string origin_;
    std::string path_;
};

/// Whether a failed attempt is worth re-sending.
bool retryable(const PredictionError& e);

struct BatchResult {
    size_t index = 0;
    std::optional<Observation> obs;
    std::optional<PredictionError> error;
};

class RemotePredictor : public Predictor {
public:
    explicit RemotePredictor(RemoteConfig cfg);

    std::string render_prompt(const PredictionRequest& req) const;
    Observation predict(const PredictionRequest& req) override;
    std::string name() const override { return "remote"; }

    /// Runs requests on `threads` workers; in-flight requests stay within max_in_flight.
    /// Results are ordered by request index whatever the completion order.
    std::vector<BatchResult> predict_batch(const std::vector<PredictionRequest>& reqs, unsigned threads);

private:
    ChatClient client_;
    std::unique_ptr<std::counting_semaphore<>> slots_;
};

std::unique_ptr<Predictor> make_predictor(const std::string& backend, const SimConfig& sim, const RemoteConfig& remote);

}  // namespace starwm
