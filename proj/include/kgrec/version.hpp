#pragma once

namespace kgrec {

// Recorded in run manifests; bump when an artifact format changes so stale
// caches invalidate themselves.
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace kgrec
