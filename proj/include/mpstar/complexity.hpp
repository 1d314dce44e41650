#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mpstar/proofs.hpp"
#include "mpstar/vm.hpp"

namespace mpstar::complexity {

// Anytime upper bound on the length of the shortest program certifiably
// equivalent to the reference program.
struct K2Estimate {
    size_t best_len_bits = 0;
    vm::Program witness;
    std::optional<proofs::Certificate> witness_cert;
    uint64_t budget_spent = 0;
    // (a_step, best_len) at the baseline and at each improvement.
    std::vector<std::pair<uint64_t, size_t>> trajectory;
};

// Enumerates certificates for `budget` A-steps, tracking the minimum subject
// length. At budget 0 the estimate is l(pstar) itself, witnessed by the
// empty-chain certificate. Nonincreasing in budget.
K2Estimate k2_upper_bound(const vm::Program& pstar, uint64_t budget);

}  // namespace mpstar::complexity
