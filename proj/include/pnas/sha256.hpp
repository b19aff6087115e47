#pragma once

#include <string>
#include <string_view>

namespace pnas {

// SHA-256 (FIPS 180-4) of the given bytes, as a lowercase hex string.
// Config keys and output manifests hash through this; it is implemented
// locally so the library has no crypto dependency for one digest.
std::string sha256_hex(std::string_view data);

}  // namespace pnas
