#pragma once

#include <cstdint>

namespace privesc {

/// Three-valued belief: true (+1), unknown (0), false (-1).
enum class Trit : std::int8_t { False = -1, Unknown = 0, True = 1 };

constexpr Trit to_trit(bool b) { return b ? Trit::True : Trit::False; }

constexpr double encode(Trit t) { return static_cast<double>(static_cast<int>(t)); }

constexpr double encode(bool b) { return b ? 1.0 : -1.0; }

constexpr const char* to_string(Trit t) {
  switch (t) {
    case Trit::True: return "true";
    case Trit::False: return "false";
    default: return "unknown";
  }
}

}  // namespace privesc
