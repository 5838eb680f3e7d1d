#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace starwm {

inline constexpr std::string_view kPromptVersion = "1";
inline constexpr std::string_view kNoThinkSuffix = "\n/no_think";
inline constexpr std::string_view kEmptyThinkBlock = "<think>\n\n</think>";

std::string_view world_model_template();
std::string_view refinement_template();
std::string_view self_reflection_template();

/// Replaces each "{name}" whose name is a key of `values` in one left-to-right pass;
/// substituted text is never rescanned.
std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& values);

/// "{identifier}" tokens still present in text.
std::vector<std::string> residual_placeholders(std::string_view text);

std::string render_world_model_prompt(int player_id, int delta_s, std::string_view start_obs,
                                      std::string_view action_section, bool no_think = true);
std::string render_assistant_observation(std::string_view obs_text, bool no_think = true);

/// Follow-up user turn carrying a predicted observation.
std::string render_refinement_prompt(std::string_view report, bool no_think = true);
/// Follow-up user turn for the self-reflection ablation (no prediction).
std::string render_self_reflection_prompt(bool no_think = true);

/// Drops a leading "<think>...</think>" block and the whitespace after it.
std::string strip_think_block(std::string_view reply);

}  // namespace starwm
