#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "mpstar/enumeration.hpp"
#include "mpstar/vm.hpp"

namespace mpstar::levin {

// Find y with g(y) = x; g is the trusted verifier, run on the same metered VM.
struct InversionProblem {
    vm::Program g;
    uint64_t x = 0;
};

struct SearchReport {
    uint64_t witness = 0;
    size_t finder_index = 0;  // 1-based index of the finding program
    uint64_t total_steps = 0;
    uint64_t time_plus = 0;  // finder runtime plus verification steps
};

// Index k of the program that owns interleaving step n (n >= 1): the
// 2-adic valuation of n plus one, i.e. the sequence 1 2 1 3 1 2 1 4 ...
size_t simple_index(uint64_t n);

// Ordered program supply: an explicit test list or the canonical
// length-lexicographic enumeration.
class ProgramSupply {
public:
    virtual ~ProgramSupply() = default;
    virtual const vm::Program* get(size_t index) = 0;  // nullptr past the end
    virtual bool length_sorted() const = 0;
};

class VectorSupply final : public ProgramSupply {
public:
    explicit VectorSupply(std::vector<vm::Program> programs)
        : programs_(std::move(programs)) {}
    const vm::Program* get(size_t index) override {
        return index < programs_.size() ? &programs_[index] : nullptr;
    }
    bool length_sorted() const override { return false; }

private:
    std::vector<vm::Program> programs_;
};

class CanonicalSupply final : public ProgramSupply {
public:
    const vm::Program* get(size_t index) override { return &enumerator_.at(index); }
    bool length_sorted() const override { return true; }

private:
    enumeration::ProgramEnumerator enumerator_;
};

// Ruler-sequence interleaving: one step at a time per simple_index; when a
// program halts, its candidate is verified with g inside its own step share.
// Returns nullopt when `ceiling` interleaving steps elapse without a verified
// witness.
std::optional<SearchReport> simple_search(const InversionProblem& problem,
                                          ProgramSupply& programs, uint64_t ceiling);

struct PhaseAllotment {
    uint64_t phase = 0;        // i
    size_t program_index = 0;  // 0-based supply index
    size_t program_len = 0;    // l(p) in bits
    uint64_t budget = 0;       // floor(2^i * 2^-l(p))
};

// Phase scheme: in phase i every program with l(p) < i gets a fresh run of
// floor(2^i * 2^-l(p)) steps, verification charged within the same budget.
std::optional<SearchReport> search_phases(const InversionProblem& problem,
                                          ProgramSupply& programs, uint64_t ceiling,
                                          std::vector<PhaseAllotment>* allotments = nullptr);

}  // namespace mpstar::levin
