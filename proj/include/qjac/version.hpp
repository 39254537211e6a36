#pragma once

namespace qjac {

// Bumped whenever a convention baked into cached results changes
// (s_k constant-term resolution, pairing seam orientation, ...).
inline constexpr const char* code_version = "qjac-0.3";

} // namespace qjac
