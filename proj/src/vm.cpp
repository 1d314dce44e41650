#include "mpstar/vm.hpp"

#include <cassert>

namespace mpstar::vm {

using codec::CodecError;
using codec::CodecErrorKind;

MachineState fresh_state(uint64_t input) {
    MachineState st;
    st.regs[0] = input;
    return st;
}

void encode_instruction(BitString& out, const Instruction& ins) {
    out.append_bits(static_cast<uint64_t>(ins.op), kOpcodeBits);
    if (has_reg(ins.op)) out.append_bits(ins.reg, kRegBits);
    if (has_target(ins.op)) codec::gamma_append(out, static_cast<uint64_t>(ins.target) + 1);
}

BitString encode_program(const std::vector<Instruction>& instructions) {
    BitString out;
    codec::gamma_append(out, instructions.size());
    for (const Instruction& ins : instructions) encode_instruction(out, ins);
    return out;
}

static void validate_instructions(const std::vector<Instruction>& instructions) {
    if (instructions.empty())
        throw CodecError(CodecErrorKind::MALFORMED, "program must have at least one instruction");
    for (const Instruction& ins : instructions) {
        if (has_reg(ins.op) && ins.reg >= kRegisterCount)
            throw CodecError(CodecErrorKind::MALFORMED, "register index out of range");
        if (has_target(ins.op) && ins.target >= instructions.size())
            throw CodecError(CodecErrorKind::BAD_TARGET, "jump target out of range");
    }
}

Program make_program(std::vector<Instruction> instructions) {
    validate_instructions(instructions);
    Program p;
    p.bits = encode_program(instructions);
    p.instructions = std::move(instructions);
    return p;
}

static Instruction decode_instruction(BitReader& r) {
    if (r.remaining() < kOpcodeBits)
        throw CodecError(CodecErrorKind::MALFORMED, "truncated opcode");
    const uint64_t op = r.read_bits(kOpcodeBits);
    if (op > static_cast<uint64_t>(Opcode::HALT))
        throw CodecError(CodecErrorKind::MALFORMED, "invalid opcode");
    Instruction ins;
    ins.op = static_cast<Opcode>(op);
    if (has_reg(ins.op)) {
        if (r.remaining() < kRegBits)
            throw CodecError(CodecErrorKind::MALFORMED, "truncated register field");
        ins.reg = static_cast<uint8_t>(r.read_bits(kRegBits));
    }
    if (has_target(ins.op)) {
        const uint64_t t = codec::gamma_decode(r);
        ins.target = static_cast<uint32_t>(t - 1);
    }
    return ins;
}

Program decode_program_prefix(BitReader& reader) {
    const size_t start = reader.position();
    const uint64_t count = codec::gamma_decode(reader);
    std::vector<Instruction> instructions;
    instructions.reserve(count);
    for (uint64_t i = 0; i < count; ++i) instructions.push_back(decode_instruction(reader));
    validate_instructions(instructions);
    Program p;
    p.instructions = std::move(instructions);
    p.bits = encode_program(p.instructions);
    // The encoding is canonical, so re-encoding reproduces the consumed bits.
    assert(p.bits.size() == reader.position() - start);
    (void)start;
    return p;
}

Program decode_program(const BitString& bits) {
    BitReader r(bits);
    Program p = decode_program_prefix(r);
    if (!r.exhausted())
        throw CodecError(CodecErrorKind::MALFORMED, "trailing bits after program");
    return p;
}

RunOutcome run_metered(const Program& p, uint64_t budget, MachineState st) {
    const auto& ins = p.instructions;
    const uint32_t n = static_cast<uint32_t>(ins.size());
    uint64_t used = 0;
    while (st.status == Status::RUNNING) {
        if (st.pc >= n) {
            // Fell off the end: halting configuration, no step cost.
            st.status = Status::HALTED;
            break;
        }
        if (used == budget) return RunOutcome{RunOutcome::Kind::BUDGET_EXHAUSTED, 0, st};
        const Instruction& I = ins[st.pc];
        switch (I.op) {
            case Opcode::INC:
                ++st.regs[I.reg];
                ++st.pc;
                break;
            case Opcode::DEC:
                if (st.regs[I.reg] > 0) --st.regs[I.reg];  // saturating
                ++st.pc;
                break;
            case Opcode::JZ:
                st.pc = (st.regs[I.reg] == 0) ? I.target : st.pc + 1;
                break;
            case Opcode::JMP:
                st.pc = I.target;
                break;
            case Opcode::HALT:
                st.status = Status::HALTED;
                break;
        }
        ++st.steps_executed;
        ++used;
    }
    if (st.status == Status::HALTED)
        return RunOutcome{RunOutcome::Kind::HALTED, st.regs[0], st};
    return RunOutcome{RunOutcome::Kind::FAULT, 0, st};
}

RunOutcome run_metered(const Program& p, uint64_t input, uint64_t budget) {
    return run_metered(p, budget, fresh_state(input));
}

std::optional<uint64_t> count_steps(const Program& p, uint64_t input, uint64_t ceiling) {
    RunOutcome out = run_metered(p, input, ceiling);
    if (out.kind == RunOutcome::Kind::HALTED) return out.state.steps_executed;
    return std::nullopt;
}

}  // namespace mpstar::vm
