#include "mpstar/enumeration.hpp"

#include <algorithm>

namespace mpstar::enumeration {

using vm::Instruction;
using vm::Opcode;

namespace {

// Instruction encodings possible in a program of `count` instructions,
// grouped by bit length. Targets range over [0, count).
std::vector<std::vector<Instruction>> instructions_by_length(uint64_t count, size_t max_len) {
    std::vector<std::vector<Instruction>> by_len(max_len + 1);
    auto put = [&](const Instruction& ins, size_t len) {
        if (len <= max_len) by_len[len].push_back(ins);
    };
    put(Instruction{Opcode::HALT, 0, 0}, 3);
    for (unsigned r = 0; r < vm::kRegisterCount; ++r) {
        put(Instruction{Opcode::INC, static_cast<uint8_t>(r), 0}, 9);
        put(Instruction{Opcode::DEC, static_cast<uint8_t>(r), 0}, 9);
    }
    for (uint64_t t = 0; t < count; ++t) {
        const size_t glen = codec::gamma_length(t + 1);
        put(Instruction{Opcode::JMP, 0, static_cast<uint32_t>(t)}, 3 + glen);
        for (unsigned r = 0; r < vm::kRegisterCount; ++r)
            put(Instruction{Opcode::JZ, static_cast<uint8_t>(r), static_cast<uint32_t>(t)},
                9 + glen);
    }
    return by_len;
}

void fill_slots(const std::vector<std::vector<Instruction>>& by_len, uint64_t count,
                size_t slot, size_t remaining, std::vector<Instruction>& current,
                std::vector<vm::Program>& out) {
    if (slot == count) {
        if (remaining == 0) out.push_back(vm::make_program(current));
        return;
    }
    const size_t slots_left_after = count - slot - 1;
    const size_t min_rest = 3 * slots_left_after;
    for (size_t len = 3; len + min_rest <= remaining && len < by_len.size(); ++len) {
        for (const Instruction& ins : by_len[len]) {
            current.push_back(ins);
            fill_slots(by_len, count, slot + 1, remaining - len, current, out);
            current.pop_back();
        }
    }
}

}  // namespace

std::vector<vm::Program> programs_of_length(size_t len) {
    std::vector<vm::Program> out;
    if (len < 4) return out;  // gamma(1) + HALT = 4 bits is the minimum
    for (uint64_t count = 1; 3 * count + 1 <= len; ++count) {
        const size_t glen = codec::gamma_length(count);
        if (glen + 3 * count > len) continue;
        const size_t body = len - glen;
        auto by_len = instructions_by_length(count, body);
        std::vector<Instruction> current;
        current.reserve(count);
        fill_slots(by_len, count, 0, body, current, out);
    }
    std::sort(out.begin(), out.end(),
              [](const vm::Program& a, const vm::Program& b) { return a.bits < b.bits; });
    return out;
}

void ProgramEnumerator::extend_one_length() {
    auto batch = programs_of_length(next_len_++);
    programs_.insert(programs_.end(), std::make_move_iterator(batch.begin()),
                     std::make_move_iterator(batch.end()));
}

const vm::Program& ProgramEnumerator::at(size_t index) {
    while (index >= programs_.size()) extend_one_length();
    return programs_[index];
}

size_t ProgramEnumerator::count_below_length(size_t bound) {
    while (next_len_ < bound) extend_one_length();
    const auto it = std::lower_bound(
        programs_.begin(), programs_.end(), bound,
        [](const vm::Program& p, size_t b) { return p.length_bits() < b; });
    return static_cast<size_t>(it - programs_.begin());
}

}  // namespace mpstar::enumeration
