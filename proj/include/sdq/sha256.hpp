#pragma once

#include <string>
#include <string_view>

namespace sdq {

// Hex digest of the SHA-256 hash of `data`.
std::string sha256_hex(std::string_view data);

}  // namespace sdq
