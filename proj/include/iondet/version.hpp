/**
 * This code is part of iondet.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <string>

#define IONDET_VERSION "0.1.0"

namespace iondet {

inline std::string version() { return IONDET_VERSION; }

/// Build identifier (git describe) injected by the build system.
inline std::string build_describe() {
#ifdef IONDET_BUILD_DESCRIBE
  return IONDET_BUILD_DESCRIBE;
#else
  return "unknown";
#endif
}

} // namespace iondet
