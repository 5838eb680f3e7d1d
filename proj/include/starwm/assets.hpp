#pragma once

#include <string_view>

namespace starwm {

/// Bytes of a file under assets/ or data/ compiled into the library, e.g. "prompts/world_model.txt".
std::string_view embedded_asset(std::string_view name);

}  // namespace starwm
