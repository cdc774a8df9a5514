#pragma once

#include <string>
#include <string_view>

namespace kgrec {

// SHA-256, lowercase hex. Used for cache keys and the run manifest.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::string& path);  // throws IoError

}  // namespace kgrec
