#pragma once

#include <cstdint>
#include <vector>

#include "mpstar/vm.hpp"

namespace mpstar::enumeration {

// All valid program encodings of exactly `len` bits, lexicographic order.
std::vector<vm::Program> programs_of_length(size_t len);

// Canonical (length, lexicographic) program enumeration, lazily extended.
// Index 0 is the shortest program, [HALT].
class ProgramEnumerator {
public:
    const vm::Program& at(size_t index);

    // Number of programs with length_bits < bound; they occupy the canonical
    // order's prefix [0, count).
    size_t count_below_length(size_t bound);

private:
    void extend_one_length();

    std::vector<vm::Program> programs_;
    size_t next_len_ = 1;
};

}  // namespace mpstar::enumeration
