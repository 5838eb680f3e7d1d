#include "starwm/prompts.hpp"

#include <cctype>

#include "starwm/assets.hpp"

namespace starwm {

std::string_view world_model_template() { return embedded_asset("prompts/world_model.txt"); }
std::string_view refinement_template() { return embedded_asset("prompts/refine_with_prediction.txt"); }
std::string_view self_reflection_template() { return embedded_asset("prompts/self_reflection.txt"); }

std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size());
    size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            const size_t close = tmpl.find('}', i + 1);
            if (close != std::string_view::npos) {
                auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
                if (it != values.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += tmpl[i++];
    }
    return out;
}

std::vector<std::string> residual_placeholders(std::string_view text) {
    std::vector<std::string> found;
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{') continue;
        size_t j = i + 1;
        while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
        if (j > i + 1 && j < text.size() && text[j] == '}') found.emplace_back(text.substr(i, j - i + 1));
    }
    return found;
}

std::string render_world_model_prompt(int player_id, int delta_s, std::string_view start_obs,
                                      std::string_view action_section, bool no_think) {
    std::string out = substitute(world_model_template(), {{"player_id", std::to_string(player_id)},
                                                          {"delta", std::to_string(delta_s)},
                                                          {"start_obs", std::string(start_obs)},
                                                          {"action_section", std::string(action_section)}});
    if (no_think) out += kNoThinkSuffix;
    return out;
}

std::string render_assistant_observation(std::string_view obs_text, bool no_think) {
    std::string out = no_think ? std::string(kEmptyThinkBlock) : std::string();
    out += obs_text;
    return out;
}

std::string render_refinement_prompt(std::string_view report, bool no_think) {
    std::string out = "\n" + substitute(refinement_template(), {{"report", std::string(report)}});
    if (no_think) out += kNoThinkSuffix;
    return out;
}

std::string render_self_reflection_prompt(bool no_think) {
    std::string out = "\n" + std::string(self_reflection_template());
    if (no_think) out += kNoThinkSuffix;
    return out;
}

std::string strip_think_block(std::string_view reply) {
    size_t i = 0;
    auto skip_ws = [&] {
        while (i < reply.size() && std::isspace(static_cast<unsigned char>(reply[i]))) ++i;
    };
    skip_ws();
    if (reply.substr(i, 7) == "<think>") {
        const size_t end = reply.find("</think>", i);
        if (end != std::string_view::npos) {
            i = end + 8;
            skip_ws();
        }
    }
    return std::string(reply.substr(i));
}

}  // namespace starwm
