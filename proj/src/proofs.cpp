#include "mpstar/proofs.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <sstream>
#include <variant>

#include "mpstar/asm.hpp"

namespace mpstar::proofs {

using codec::CodecError;
using codec::CodecErrorKind;
using vm::Instruction;
using vm::Opcode;

namespace {

constexpr unsigned kStepKindBits = 3;
constexpr size_t kEnumerationLevelCap = 1u << 22;

struct CostMeter {
    uint64_t units = 0;
    void charge(uint64_t n) { units += n; }
};

// Instructions reachable from pc 0 along static control flow.
std::vector<bool> reachable_set(const std::vector<Instruction>& ins, CostMeter& meter) {
    std::vector<bool> seen(ins.size(), false);
    std::deque<uint32_t> queue;
    auto visit = [&](uint32_t pc) {
        if (pc < ins.size() && !seen[pc]) {
            seen[pc] = true;
            queue.push_back(pc);
        }
    };
    visit(0);
    while (!queue.empty()) {
        const uint32_t pc = queue.front();
        queue.pop_front();
        meter.charge(1);
        const Instruction& I = ins[pc];
        switch (I.op) {
            case Opcode::INC:
            case Opcode::DEC:
                visit(pc + 1);
                break;
            case Opcode::JZ:
                visit(I.target);
                visit(pc + 1);
                break;
            case Opcode::JMP:
                visit(I.target);
                break;
            case Opcode::HALT:
                break;
        }
    }
    return seen;
}

struct StepFailure {
    std::string reason;
};

using StepResult = std::variant<std::vector<Instruction>, StepFailure>;

StepResult apply_step(const std::vector<Instruction>& cur, const RewriteStep& step,
                      CostMeter& meter) {
    const uint32_t n = static_cast<uint32_t>(cur.size());
    switch (step.kind) {
        case StepKind::DELETE_DEAD: {
            if (step.index >= n) return StepFailure{"delete index out of range"};
            const auto seen = reachable_set(cur, meter);
            if (seen[step.index]) return StepFailure{"deleted instruction is reachable"};
            for (uint32_t j = 0; j < n; ++j) {
                meter.charge(1);
                if (j != step.index && vm::has_target(cur[j].op) && cur[j].target == step.index)
                    return StepFailure{"another instruction targets the deleted index"};
            }
            std::vector<Instruction> out;
            out.reserve(n - 1);
            for (uint32_t j = 0; j < n; ++j) {
                if (j == step.index) continue;
                Instruction ins = cur[j];
                if (vm::has_target(ins.op) && ins.target > step.index) --ins.target;
                out.push_back(ins);
                meter.charge(1);
            }
            return out;
        }
        case StepKind::DELETE_NOP: {
            if (step.index >= n) return StepFailure{"delete index out of range"};
            const Instruction& nop = cur[step.index];
            if (nop.op != Opcode::JMP || nop.target != step.index + 1)
                return StepFailure{"instruction is not a jump-to-next"};
            std::vector<Instruction> out;
            out.reserve(n - 1);
            for (uint32_t j = 0; j < n; ++j) {
                if (j == step.index) continue;
                Instruction ins = cur[j];
                // Targets equal to the removed index now point at its successor,
                // which is exactly where the no-op led.
                if (vm::has_target(ins.op) && ins.target > step.index) --ins.target;
                out.push_back(ins);
                meter.charge(1);
            }
            return out;
        }
        case StepKind::INSERT_NOP: {
            if (step.index >= n) return StepFailure{"insert index out of range"};
            std::vector<Instruction> out;
            out.reserve(n + 1);
            for (uint32_t j = 0; j < n; ++j) {
                Instruction ins = cur[j];
                if (vm::has_target(ins.op) && ins.target >= step.index) ++ins.target;
                if (j == step.index)
                    out.push_back(Instruction{Opcode::JMP, 0, step.index + 1});
                out.push_back(ins);
                meter.charge(1);
            }
            return out;
        }
        case StepKind::INSERT_DEAD: {
            if (step.index > n) return StepFailure{"insert index out of range"};
            const Instruction& ins = step.instr;
            if (vm::has_reg(ins.op) && ins.reg >= vm::kRegisterCount)
                return StepFailure{"inserted register out of range"};
            if (vm::has_target(ins.op) && ins.target >= n + 1)
                return StepFailure{"inserted jump target out of range"};
            std::vector<Instruction> out;
            out.reserve(n + 1);
            for (uint32_t j = 0; j <= n; ++j) {
                if (j == step.index) out.push_back(ins);
                if (j == n) break;
                Instruction moved = cur[j];
                if (vm::has_target(moved.op) && moved.target >= step.index) ++moved.target;
                out.push_back(moved);
                meter.charge(1);
            }
            const auto seen = reachable_set(out, meter);
            if (seen[step.index]) return StepFailure{"inserted instruction is reachable"};
            return out;
        }
        case StepKind::RENAME_REG: {
            const uint8_t a = step.reg_from, b = step.reg_to;
            if (a == 0 || b == 0) return StepFailure{"register 0 cannot be renamed"};
            if (a == b) return StepFailure{"rename source equals destination"};
            if (a >= vm::kRegisterCount || b >= vm::kRegisterCount)
                return StepFailure{"rename register out of range"};
            bool a_occurs = false, b_occurs = false;
            for (const Instruction& ins : cur) {
                meter.charge(1);
                if (vm::has_reg(ins.op)) {
                    if (ins.reg == a) a_occurs = true;
                    if (ins.reg == b) b_occurs = true;
                }
            }
            if (!a_occurs) return StepFailure{"rename source register does not occur"};
            if (b_occurs) return StepFailure{"rename destination register occurs"};
            std::vector<Instruction> out = cur;
            for (Instruction& ins : out) {
                meter.charge(1);
                if (vm::has_reg(ins.op) && ins.reg == a) ins.reg = b;
            }
            return out;
        }
    }
    return StepFailure{"unknown step kind"};
}

}  // namespace

bool is_loop_free(const vm::Program& p) {
    for (uint32_t i = 0; i < p.instructions.size(); ++i) {
        const Instruction& ins = p.instructions[i];
        if (vm::has_target(ins.op) && ins.target <= i) return false;
    }
    return true;
}

std::optional<vm::Program> step_counter_bound(const vm::Program& subject) {
    for (const Instruction& ins : subject.instructions)
        if (vm::has_reg(ins.op) && ins.reg == kCounterRegister) return std::nullopt;

    const uint32_t n = static_cast<uint32_t>(subject.instructions.size());
    const uint32_t epilogue = 2 * n;
    std::vector<Instruction> out;
    out.reserve(2 * n + 8);
    for (uint32_t i = 0; i < n; ++i) {
        out.push_back(Instruction{Opcode::INC, kCounterRegister, 0});
        Instruction ins = subject.instructions[i];
        switch (ins.op) {
            case Opcode::JZ:
            case Opcode::JMP:
                ins.target = 2 * ins.target;
                break;
            case Opcode::HALT:
                ins = Instruction{Opcode::JMP, 0, epilogue};
                break;
            default:
                break;
        }
        out.push_back(ins);
    }
    // Zero register 0, then move the step counter into it.
    out.push_back(Instruction{Opcode::JZ, 0, epilogue + 3});       // E
    out.push_back(Instruction{Opcode::DEC, 0, 0});                 // E+1
    out.push_back(Instruction{Opcode::JMP, 0, epilogue});          // E+2
    out.push_back(Instruction{Opcode::JZ, kCounterRegister, epilogue + 7});  // E+3
    out.push_back(Instruction{Opcode::DEC, kCounterRegister, 0});  // E+4
    out.push_back(Instruction{Opcode::INC, 0, 0});                 // E+5
    out.push_back(Instruction{Opcode::JMP, 0, epilogue + 3});      // E+6
    out.push_back(Instruction{Opcode::HALT, 0, 0});                // E+7
    return vm::make_program(std::move(out));
}

vm::Program loop_free_const_bound(size_t instruction_count) {
    std::vector<Instruction> out;
    out.reserve(instruction_count + 4);
    out.push_back(Instruction{Opcode::JZ, 0, 3});
    out.push_back(Instruction{Opcode::DEC, 0, 0});
    out.push_back(Instruction{Opcode::JMP, 0, 0});
    for (size_t i = 0; i < instruction_count; ++i)
        out.push_back(Instruction{Opcode::INC, 0, 0});
    out.push_back(Instruction{Opcode::HALT, 0, 0});
    return vm::make_program(std::move(out));
}

BitString serialize_certificate(BoundRule rule, std::span<const RewriteStep> chain) {
    BitString out;
    out.push_back(rule == BoundRule::LOOP_FREE_CONST);
    codec::gamma_append(out, chain.size() + 1);
    for (const RewriteStep& s : chain) {
        out.append_bits(static_cast<uint64_t>(s.kind), kStepKindBits);
        switch (s.kind) {
            case StepKind::DELETE_DEAD:
            case StepKind::DELETE_NOP:
            case StepKind::INSERT_NOP:
                codec::gamma_append(out, static_cast<uint64_t>(s.index) + 1);
                break;
            case StepKind::INSERT_DEAD:
                codec::gamma_append(out, static_cast<uint64_t>(s.index) + 1);
                vm::encode_instruction(out, s.instr);
                break;
            case StepKind::RENAME_REG:
                out.append_bits(s.reg_from, vm::kRegBits);
                out.append_bits(s.reg_to, vm::kRegBits);
                break;
        }
    }
    return out;
}

CertSyntax decode_certificate(BitReader& reader) {
    CertSyntax cs;
    if (reader.exhausted()) throw CodecError(CodecErrorKind::MALFORMED, "empty certificate");
    cs.rule = reader.read_bit() ? BoundRule::LOOP_FREE_CONST : BoundRule::STEP_COUNTER;
    const uint64_t count = codec::gamma_decode(reader) - 1;
    for (uint64_t i = 0; i < count; ++i) {
        if (reader.remaining() < kStepKindBits)
            throw CodecError(CodecErrorKind::MALFORMED, "truncated step kind");
        const uint64_t kind = reader.read_bits(kStepKindBits);
        if (kind > static_cast<uint64_t>(StepKind::RENAME_REG))
            throw CodecError(CodecErrorKind::MALFORMED, "invalid step kind");
        RewriteStep s;
        s.kind = static_cast<StepKind>(kind);
        switch (s.kind) {
            case StepKind::DELETE_DEAD:
            case StepKind::DELETE_NOP:
            case StepKind::INSERT_NOP: {
                const uint64_t v = codec::gamma_decode(reader);
                if (v > (1ull << 32)) throw CodecError(CodecErrorKind::MALFORMED, "index too large");
                s.index = static_cast<uint32_t>(v - 1);
                break;
            }
            case StepKind::INSERT_DEAD: {
                const uint64_t v = codec::gamma_decode(reader);
                if (v > (1ull << 32)) throw CodecError(CodecErrorKind::MALFORMED, "index too large");
                s.index = static_cast<uint32_t>(v - 1);
                if (reader.remaining() < vm::kOpcodeBits)
                    throw CodecError(CodecErrorKind::MALFORMED, "truncated instruction");
                const uint64_t op = reader.read_bits(vm::kOpcodeBits);
                if (op > static_cast<uint64_t>(Opcode::HALT))
                    throw CodecError(CodecErrorKind::MALFORMED, "invalid opcode");
                s.instr.op = static_cast<Opcode>(op);
                if (vm::has_reg(s.instr.op)) {
                    if (reader.remaining() < vm::kRegBits)
                        throw CodecError(CodecErrorKind::MALFORMED, "truncated register");
                    s.instr.reg = static_cast<uint8_t>(reader.read_bits(vm::kRegBits));
                }
                if (vm::has_target(s.instr.op)) {
                    const uint64_t t = codec::gamma_decode(reader);
                    if (t > (1ull << 32))
                        throw CodecError(CodecErrorKind::MALFORMED, "target too large");
                    s.instr.target = static_cast<uint32_t>(t - 1);
                }
                break;
            }
            case StepKind::RENAME_REG: {
                if (reader.remaining() < 2u * vm::kRegBits)
                    throw CodecError(CodecErrorKind::MALFORMED, "truncated rename");
                s.reg_from = static_cast<uint8_t>(reader.read_bits(vm::kRegBits));
                s.reg_to = static_cast<uint8_t>(reader.read_bits(vm::kRegBits));
                break;
            }
        }
        cs.chain.push_back(s);
    }
    return cs;
}

CheckResult check_certificate(const vm::Program& pstar, BoundRule rule,
                              std::span<const RewriteStep> chain) {
    CostMeter meter;
    CheckResult result;
    std::vector<Instruction> cur = pstar.instructions;
    for (size_t i = 0; i < chain.size(); ++i) {
        StepResult step = apply_step(cur, chain[i], meter);
        if (std::holds_alternative<StepFailure>(step)) {
            result.reason = std::get<StepFailure>(step).reason;
            result.failing_step = i;
            result.cost = meter.units;
            return result;
        }
        cur = std::move(std::get<std::vector<Instruction>>(step));
    }

    Certificate cert;
    cert.bound_rule = rule;
    cert.chain.assign(chain.begin(), chain.end());
    meter.charge(cur.size());
    cert.subject = vm::make_program(std::move(cur));

    if (rule == BoundRule::STEP_COUNTER) {
        auto bound = step_counter_bound(cert.subject);
        meter.charge(2 * cert.subject.size() + 8);
        if (!bound) {
            result.reason = "subject uses the counter register";
            result.cost = meter.units;
            return result;
        }
        cert.bound = std::move(*bound);
    } else {
        meter.charge(cert.subject.size());
        if (!is_loop_free(cert.subject)) {
            result.reason = "subject has non-forward jumps";
            result.cost = meter.units;
            return result;
        }
        cert.bound = loop_free_const_bound(cert.subject.size());
        meter.charge(cert.bound.size());
    }

    const BitString serial = serialize_certificate(rule, chain);
    cert.size_bits = serial.size();
    meter.charge(serial.size());

    result.valid = true;
    result.cost = meter.units;
    result.cert = std::move(cert);
    return result;
}

uint64_t checker_quadratic_constant(size_t pstar_instruction_count) {
    return 2 * static_cast<uint64_t>(pstar_instruction_count) + 16;
}

// ---- rewrite step text form -------------------------------------------------

RewriteStep parse_rewrite_step(const std::string& text) {
    std::istringstream is(text);
    std::string tag;
    is >> tag;
    RewriteStep s;
    auto read_index = [&](const char* what) {
        long long v = -1;
        if (!(is >> v) || v < 0) throw ScriptError(std::string("bad ") + what + ": " + text);
        return static_cast<uint32_t>(v);
    };
    if (tag == "dd") {
        s.kind = StepKind::DELETE_DEAD;
        s.index = read_index("delete index");
    } else if (tag == "dn") {
        s.kind = StepKind::DELETE_NOP;
        s.index = read_index("delete index");
    } else if (tag == "in") {
        s.kind = StepKind::INSERT_NOP;
        s.index = read_index("insert index");
    } else if (tag == "id") {
        s.kind = StepKind::INSERT_DEAD;
        s.index = read_index("insert index");
        std::string rest;
        std::getline(is, rest);
        try {
            s.instr = assembly::parse_instruction(rest);
        } catch (const assembly::AsmError& e) {
            throw ScriptError("bad inserted instruction in '" + text + "': " + e.what());
        }
    } else if (tag == "rr") {
        s.kind = StepKind::RENAME_REG;
        s.reg_from = static_cast<uint8_t>(read_index("rename source"));
        s.reg_to = static_cast<uint8_t>(read_index("rename destination"));
    } else {
        throw ScriptError("unknown rewrite step '" + text + "'");
    }
    std::string extra;
    if (tag != "id" && (is >> extra)) throw ScriptError("trailing tokens in '" + text + "'");
    return s;
}

std::string rewrite_step_to_string(const RewriteStep& s) {
    switch (s.kind) {
        case StepKind::DELETE_DEAD: return "dd " + std::to_string(s.index);
        case StepKind::DELETE_NOP: return "dn " + std::to_string(s.index);
        case StepKind::INSERT_NOP: return "in " + std::to_string(s.index);
        case StepKind::INSERT_DEAD:
            return "id " + std::to_string(s.index) + " " +
                   assembly::instruction_to_string(s.instr);
        case StepKind::RENAME_REG:
            return "rr " + std::to_string(s.reg_from) + " " + std::to_string(s.reg_to);
    }
    return "?";
}

// ---- exact-length walker -----------------------------------------------------

namespace {

struct Walker {
    BitString buf;
    const std::function<void(const BitString&)>* fn;

    void gamma_push(uint64_t v, unsigned z) {
        for (unsigned i = 0; i < z; ++i) buf.push_back(false);
        buf.append_bits(v, z + 1);
    }

    // Iterate gamma codewords in lexicographic order: longer zero runs first,
    // then ascending value within a run. Values above `value_cap` are skipped
    // (used to prune chain counts that cannot fit in the remaining bits).
    template <typename F>
    void for_each_gamma(size_t max_glen, F&& body, uint64_t value_cap = UINT64_MAX) {
        if (max_glen == 0) return;
        const unsigned z_max = static_cast<unsigned>((max_glen - 1) / 2);
        for (unsigned z = z_max + 1; z-- > 0;) {
            const uint64_t lo = 1ull << z, hi = 1ull << (z + 1);
            for (uint64_t v = lo; v < hi && v <= value_cap; ++v) {
                const size_t before = buf.size();
                gamma_push(v, z);
                body(v, 2 * static_cast<size_t>(z) + 1);
                buf.truncate(before);
            }
        }
    }

    void steps(uint64_t remaining_steps, size_t rem_bits) {
        if (remaining_steps == 0) {
            if (rem_bits == 0) (*fn)(buf);
            return;
        }
        const size_t min_rest = 4 * (remaining_steps - 1);
        if (rem_bits < 4 + min_rest) return;
        const size_t step_budget = rem_bits - min_rest;
        for (uint64_t kind = 0; kind <= static_cast<uint64_t>(StepKind::RENAME_REG); ++kind) {
            const size_t before = buf.size();
            buf.append_bits(kind, kStepKindBits);
            switch (static_cast<StepKind>(kind)) {
                case StepKind::DELETE_DEAD:
                case StepKind::DELETE_NOP:
                case StepKind::INSERT_NOP:
                    if (step_budget >= 4) {
                        for_each_gamma(step_budget - 3, [&](uint64_t, size_t glen) {
                            steps(remaining_steps - 1, rem_bits - 3 - glen);
                        });
                    }
                    break;
                case StepKind::INSERT_DEAD:
                    if (step_budget >= 3 + 1 + 3) {
                        for_each_gamma(step_budget - 3 - 3, [&](uint64_t, size_t glen) {
                            instruction(remaining_steps, rem_bits - 3 - glen);
                        });
                    }
                    break;
                case StepKind::RENAME_REG:
                    if (step_budget >= 3 + 12 && rem_bits >= 15) {
                        for (uint64_t a = 0; a < vm::kRegisterCount; ++a)
                            for (uint64_t b = 0; b < vm::kRegisterCount; ++b) {
                                const size_t mark = buf.size();
                                buf.append_bits(a, vm::kRegBits);
                                buf.append_bits(b, vm::kRegBits);
                                steps(remaining_steps - 1, rem_bits - 15);
                                buf.truncate(mark);
                            }
                    }
                    break;
            }
            buf.truncate(before);
        }
    }

    // The instruction payload of an INSERT_DEAD step; rem_bits counts the
    // instruction plus all remaining steps.
    void instruction(uint64_t remaining_steps, size_t rem_bits) {
        const size_t min_rest = 4 * (remaining_steps - 1);
        if (rem_bits < 3 + min_rest) return;
        const size_t instr_budget = rem_bits - min_rest;
        for (uint64_t op = 0; op <= static_cast<uint64_t>(Opcode::HALT); ++op) {
            const auto opc = static_cast<Opcode>(op);
            const size_t before = buf.size();
            buf.append_bits(op, vm::kOpcodeBits);
            size_t used = vm::kOpcodeBits;
            if (vm::has_reg(opc)) {
                if (instr_budget < used + vm::kRegBits + (vm::has_target(opc) ? 1 : 0)) {
                    buf.truncate(before);
                    continue;
                }
                for (uint64_t r = 0; r < vm::kRegisterCount; ++r) {
                    const size_t mark = buf.size();
                    buf.append_bits(r, vm::kRegBits);
                    if (vm::has_target(opc)) {
                        for_each_gamma(instr_budget - used - vm::kRegBits,
                                       [&](uint64_t, size_t glen) {
                                           steps(remaining_steps - 1,
                                                 rem_bits - used - vm::kRegBits - glen);
                                       });
                    } else {
                        steps(remaining_steps - 1, rem_bits - used - vm::kRegBits);
                    }
                    buf.truncate(mark);
                }
            } else if (vm::has_target(opc)) {
                if (instr_budget >= used + 1) {
                    for_each_gamma(instr_budget - used, [&](uint64_t, size_t glen) {
                        steps(remaining_steps - 1, rem_bits - used - glen);
                    });
                }
            } else {
                steps(remaining_steps - 1, rem_bits - used);
            }
            buf.truncate(before);
        }
    }
};

}  // namespace

void walk_certificate_serializations(size_t len,
                                     const std::function<void(const BitString&)>& fn) {
    if (len < 2) return;
    Walker w;
    w.fn = &fn;
    for (int rule = 0; rule < 2; ++rule) {
        w.buf.push_back(rule != 0);
        // A chain of k steps needs at least 4k bits, so k+1 <= rem/4 + 1.
        w.for_each_gamma(
            len - 1,
            [&](uint64_t v, size_t glen) { w.steps(v - 1, len - 1 - glen); },
            (len - 1) / 4 + 1);
        w.buf.truncate(0);
    }
}

// ---- enumerate source --------------------------------------------------------

EnumerateSource::EnumerateSource(vm::Program pstar) : pstar_(std::move(pstar)) {}

void EnumerateSource::load_next_candidate() {
    while (level_pos_ >= level_.size()) {
        level_.clear();
        level_pos_ = 0;
        walk_certificate_serializations(level_len_, [this](const BitString& bits) {
            if (level_.size() >= kEnumerationLevelCap)
                throw std::logic_error("certificate enumeration level exceeds internal cap");
            level_.push_back(bits);
        });
        ++level_len_;
    }
    const BitString& bits = level_[level_pos_++];
    BitReader reader(bits);
    CertSyntax syntax = decode_certificate(reader);
    assert(reader.exhausted());
    CheckResult res = check_certificate(pstar_, syntax.rule, syntax.chain);
    Candidate cand;
    cand.cost = bits.size() + res.cost;  // decode charged one unit per bit
    cand.valid = res.valid;
    if (res.valid) cand.cert = std::move(*res.cert);
    current_ = std::move(cand);
    paid_ = 0;
}

void EnumerateSource::advance(uint64_t budget, std::vector<ProofEvent>& out) {
    while (budget > 0) {
        if (!current_) load_next_candidate();
        const uint64_t need = current_->cost - paid_;
        const uint64_t pay = std::min(need, budget);
        paid_ += pay;
        consumed_ += pay;
        budget -= pay;
        if (paid_ == current_->cost) {
            if (current_->valid) {
                ProofEvent ev;
                ev.a_step = consumed_;
                ev.p = current_->cert.subject;
                ev.t = current_->cert.bound;
                ev.cert = std::move(current_->cert);
                out.push_back(std::move(ev));
            }
            current_.reset();
            paid_ = 0;
        }
    }
}

// ---- scripted source -----------------------------------------------------------

ScriptedSource::ScriptedSource(vm::Program pstar, std::vector<ScriptEntry> script) {
    uint64_t prev = 0;
    for (size_t i = 0; i < script.size(); ++i) {
        ScriptEntry& e = script[i];
        if (e.a_step < prev)
            throw ScriptError("script entries not sorted by a_step (entry " +
                              std::to_string(i) + ")");
        prev = e.a_step;
        if (e.trusted) {
            if (!e.p || !e.t)
                throw ScriptError("trusted entry " + std::to_string(i) + " needs p and t");
            if (!e.declared_valid)
                throw ScriptError("trusted entry " + std::to_string(i) +
                                  " cannot be declared invalid");
            ProofEvent ev;
            ev.a_step = e.a_step;
            ev.p = std::move(*e.p);
            ev.t = std::move(*e.t);
            ev.script_index = i;
            pending_.push_back(std::move(ev));
            continue;
        }
        CheckResult res = check_certificate(pstar, e.rule, e.chain);
        if (res.valid != e.declared_valid) {
            std::string msg = "entry " + std::to_string(i) + " declared " +
                              (e.declared_valid ? "valid" : "invalid") + " but check says " +
                              (res.valid ? "valid" : ("invalid (" + res.reason + ")"));
            throw ScriptError(msg);
        }
        if (!res.valid) continue;  // modeled as a skipped non-matching proof
        Certificate cert = std::move(*res.cert);
        if (e.p && !(*e.p == cert.subject))
            throw ScriptError("entry " + std::to_string(i) +
                              ": scripted p does not match the chain result");
        if (e.t && !(*e.t == cert.bound))
            throw ScriptError("entry " + std::to_string(i) +
                              ": scripted t does not match the canonical bound");
        ProofEvent ev;
        ev.a_step = e.a_step;
        ev.p = cert.subject;
        ev.t = cert.bound;
        ev.cert = std::move(cert);
        ev.script_index = i;
        pending_.push_back(std::move(ev));
    }
}

void ScriptedSource::advance(uint64_t budget, std::vector<ProofEvent>& out) {
    consumed_ += budget;
    while (next_ < pending_.size() && pending_[next_].a_step <= consumed_) {
        out.push_back(pending_[next_]);
        ++next_;
    }
}

}  // namespace mpstar::proofs
