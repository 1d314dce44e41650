#include <doctest.h>

#include "mpstar/enumeration.hpp"

using namespace mpstar;

TEST_CASE("canonical order starts with HALT then the self-loop") {
    enumeration::ProgramEnumerator en;
    CHECK(en.at(0).bits.to_string() == "1100");    // [HALT]
    CHECK(en.at(1).bits.to_string() == "10111");   // [JMP 0]
    CHECK(en.at(0).length_bits() == 4);
    CHECK(en.at(1).length_bits() == 5);
}

TEST_CASE("each length level is lexicographically sorted and decodable") {
    for (size_t len = 4; len <= 14; ++len) {
        const auto level = enumeration::programs_of_length(len);
        for (size_t i = 0; i < level.size(); ++i) {
            CHECK(level[i].length_bits() == len);
            const auto decoded = vm::decode_program(level[i].bits);
            CHECK(decoded.instructions == level[i].instructions);
            if (i > 0) CHECK(level[i - 1].bits < level[i].bits);
        }
    }
}

namespace {

size_t instruction_bits(const vm::Instruction& ins) {
    size_t len = vm::kOpcodeBits;
    if (vm::has_reg(ins.op)) len += vm::kRegBits;
    if (vm::has_target(ins.op))
        len += mpstar::codec::gamma_length(static_cast<uint64_t>(ins.target) + 1);
    return len;
}

// Independent path: enumerate instruction lists of the exact instruction
// count directly and keep those whose encoding has the target bit length.
size_t brute_force_level_count(size_t len) {
    size_t found = 0;
    std::vector<vm::Instruction> stack;
    auto rec = [&](auto&& self, uint64_t count, size_t remaining_bits) -> void {
        if (stack.size() == count) {
            if (remaining_bits == 0) ++found;
            return;
        }
        for (int op = 0; op <= 4; ++op) {
            vm::Instruction ins;
            ins.op = static_cast<vm::Opcode>(op);
            const unsigned regs = vm::has_reg(ins.op) ? vm::kRegisterCount : 1;
            const uint64_t targets = vm::has_target(ins.op) ? count : 1;
            for (unsigned r = 0; r < regs; ++r) {
                ins.reg = static_cast<uint8_t>(r);
                for (uint64_t t = 0; t < targets; ++t) {
                    ins.target = static_cast<uint32_t>(t);
                    const size_t need = instruction_bits(ins);
                    if (need > remaining_bits) continue;
                    stack.push_back(ins);
                    self(self, count, remaining_bits - need);
                    stack.pop_back();
                }
            }
        }
    };
    for (uint64_t count = 1; 3 * count + 1 <= len; ++count) {
        const size_t glen = mpstar::codec::gamma_length(count);
        if (glen + 3 * count > len) continue;
        rec(rec, count, len - glen);
    }
    return found;
}

}  // namespace

TEST_CASE("level contents match a direct brute-force filter") {
    for (size_t len : {10, 12, 13}) {
        CHECK(enumeration::programs_of_length(len).size() == brute_force_level_count(len));
    }
}

TEST_CASE("count_below_length matches the level sizes") {
    enumeration::ProgramEnumerator en;
    size_t total = 0;
    for (size_t len = 1; len < 12; ++len) total += enumeration::programs_of_length(len).size();
    CHECK(en.count_below_length(12) == total);
    const size_t below = en.count_below_length(12);
    CHECK(en.at(below).length_bits() >= 12);
    if (below > 0) CHECK(en.at(below - 1).length_bits() < 12);
}
