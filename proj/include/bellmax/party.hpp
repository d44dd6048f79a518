#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace bellmax {

enum class Party { A = 0, B = 1, C = 2 };

inline constexpr std::array<Party, 3> kParties{Party::A, Party::B, Party::C};

constexpr int index_of(Party p) { return static_cast<int>(p); }

inline Party party_from_index(int i) {
    if (i < 0 || i > 2) throw std::out_of_range("party index must be 0, 1 or 2");
    return static_cast<Party>(i);
}

inline char party_letter(Party p) { return "ABC"[index_of(p)]; }

}  // namespace bellmax
