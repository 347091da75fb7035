// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include "cafscore/types.hpp"

namespace cafscore {

/// Canonical JSON text: object keys sorted bytewise, no insignificant
/// whitespace, reals in shortest round-trip decimal form. Stable across
/// processes and platforms, so it is safe to hash.
std::string canonical_dump(const Json& j);

/// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

}  // namespace cafscore
