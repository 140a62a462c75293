#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace privesc {

std::string base64_encode(std::string_view plain);
/// nullopt on malformed input.
std::optional<std::string> base64_decode(std::string_view encoded);

}  // namespace privesc
