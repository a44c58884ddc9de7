#pragma once

namespace gelfand {

/// Library version embedded in all serialized outputs.
inline constexpr const char* kVersion = "1.0.0";

} // namespace gelfand
