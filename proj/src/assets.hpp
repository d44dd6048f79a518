#pragma once

#include <cstdint>
#include <string_view>

// Text assets compiled in from data/ by the build (see cmake/embed.cmake).
namespace bellmax::assets {

extern const std::string_view catalog_text;
extern const std::string_view fixtures_text;

// FNV-1a 64 of the files above; a changed data file fails loudly at load time.
inline constexpr std::uint64_t catalog_checksum = 0xf572a6022b0ecb83ull;
inline constexpr std::uint64_t fixtures_checksum = 0xb3251c82a0edd5dfull;

}  // namespace bellmax::assets
