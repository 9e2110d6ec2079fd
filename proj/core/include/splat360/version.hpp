// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace splat360 {

#ifdef SPLAT360_VERSION
inline constexpr const char* kVersion = SPLAT360_VERSION;
#else
inline constexpr const char* kVersion = "unknown";
#endif

} // namespace splat360
