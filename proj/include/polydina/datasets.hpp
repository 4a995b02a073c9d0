#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace polydina {

// Bundled Q-matrices from the two assessment datasets, in the prefixed
// category-level CSV layout. Byte-stable across builds.

// 20 items, K = 5; items 5, 7, 10, 11 and 20 have two scored categories
// sharing the item's q-vector (25 category rows total).
const std::string& pisa2000_q_csv();

// 11 items, K = 8; items 3, 7 and 9 have two scored categories (14 category
// rows total); item 7's two categories require different attributes.
const std::string& timss2007_q_csv();

// FNV-1a 64-bit checksum used by the transcription tests.
std::uint64_t fnv1a64(std::string_view text);

} // namespace polydina
