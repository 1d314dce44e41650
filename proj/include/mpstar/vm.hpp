#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "mpstar/bits.hpp"
#include "mpstar/codec.hpp"

namespace mpstar::vm {

inline constexpr unsigned kRegisterCount = 64;
inline constexpr unsigned kOpcodeBits = 3;
inline constexpr unsigned kRegBits = 6;

enum class Opcode : uint8_t { INC = 0, DEC = 1, JZ = 2, JMP = 3, HALT = 4 };

inline bool has_reg(Opcode op) { return op == Opcode::INC || op == Opcode::DEC || op == Opcode::JZ; }
inline bool has_target(Opcode op) { return op == Opcode::JZ || op == Opcode::JMP; }

struct Instruction {
    Opcode op = Opcode::HALT;
    uint8_t reg = 0;      // INC/DEC/JZ
    uint32_t target = 0;  // JZ/JMP, absolute instruction index

    friend bool operator==(const Instruction&, const Instruction&) = default;
};

// A decoded program together with its canonical self-delimiting encoding.
struct Program {
    BitString bits;
    std::vector<Instruction> instructions;

    size_t length_bits() const { return bits.size(); }
    size_t size() const { return instructions.size(); }

    friend bool operator==(const Program& a, const Program& b) { return a.bits == b.bits; }
};

enum class Status : uint8_t { RUNNING, HALTED, FAULT };

struct MachineState {
    uint32_t pc = 0;
    std::array<uint64_t, kRegisterCount> regs{};
    uint64_t steps_executed = 0;
    Status status = Status::RUNNING;

    friend bool operator==(const MachineState&, const MachineState&) = default;
};

// Input convention: register 0 := input, all others 0.
MachineState fresh_state(uint64_t input);

struct RunOutcome {
    enum class Kind { HALTED, BUDGET_EXHAUSTED, FAULT };
    Kind kind = Kind::FAULT;
    uint64_t output = 0;  // register 0 at halt; valid when kind == HALTED
    MachineState state;   // resume point when kind == BUDGET_EXHAUSTED
};

// ---- encoding -------------------------------------------------------------
// Instruction: opcode (3 bits: INC=000 DEC=001 JZ=010 JMP=011 HALT=100),
// then reg (6 bits) for INC/DEC/JZ, then gamma(target+1) for JZ/JMP.
// Program: gamma(instruction count) followed by the instructions. Jump
// targets must be < count (BAD_TARGET otherwise).

void encode_instruction(BitString& out, const Instruction& ins);
BitString encode_program(const std::vector<Instruction>& instructions);

// Builds the canonical Program for an instruction list (validates targets).
Program make_program(std::vector<Instruction> instructions);

// Requires the whole bit string to be consumed (trailing bits -> MALFORMED).
Program decode_program(const BitString& bits);

// Stream decode; consumes exactly one program encoding.
Program decode_program_prefix(BitReader& reader);

// ---- execution ------------------------------------------------------------
// Executes at most `budget` instruction dispatches. DEC saturates at zero;
// running past the last instruction halts at no step cost; HALT costs one
// step. Deterministic: identical inputs give identical outcomes.

RunOutcome run_metered(const Program& p, uint64_t input, uint64_t budget);
RunOutcome run_metered(const Program& p, uint64_t budget, MachineState resume_from);

// Exact halting step count if p halts within `ceiling` steps, else nullopt
// (diverged as far as the ceiling can tell).
std::optional<uint64_t> count_steps(const Program& p, uint64_t input, uint64_t ceiling);

}  // namespace mpstar::vm
