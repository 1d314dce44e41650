#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpstar/vm.hpp"

namespace mpstar::proofs {

// How a certificate justifies its time bound.
//   STEP_COUNTER: bound is the canonical wrapper that simulates the subject
//     and outputs its exact step count (so the bound equals the runtime).
//   LOOP_FREE_CONST: subject has only forward jumps, bound is the canonical
//     constant program outputting the instruction count.
enum class BoundRule : uint8_t { STEP_COUNTER = 0, LOOP_FREE_CONST = 1 };

enum class StepKind : uint8_t {
    DELETE_DEAD = 0,  // remove an unreachable instruction (nothing may target it)
    INSERT_DEAD = 1,  // insert an instruction that is unreachable afterwards
    DELETE_NOP = 2,   // remove a jump-to-next
    INSERT_NOP = 3,   // insert a jump-to-next
    RENAME_REG = 4,   // rename every use of an occurring register to an unused one
};

struct RewriteStep {
    StepKind kind = StepKind::DELETE_DEAD;
    uint32_t index = 0;               // DELETE_* / INSERT_*
    vm::Instruction instr;            // INSERT_DEAD payload
    uint8_t reg_from = 0, reg_to = 0; // RENAME_REG

    friend bool operator==(const RewriteStep&, const RewriteStep&) = default;
};

// Text form used in scenario files: "dd 2", "id 3 JZ r0 7", "dn 1", "in 0",
// "rr 3 9".
RewriteStep parse_rewrite_step(const std::string& text);
std::string rewrite_step_to_string(const RewriteStep& step);

// Checked proof object: the chain rewrites the reference program into
// `subject` and `bound_rule` justifies `bound`.
struct Certificate {
    BoundRule bound_rule = BoundRule::STEP_COUNTER;
    std::vector<RewriteStep> chain;
    vm::Program subject;
    vm::Program bound;
    size_t size_bits = 0;  // canonical serialization length
};

// Serialization: [rule:1][gamma(#steps+1)][steps...] with per-step layout
// [kind:3] then gamma(index+1) (DELETE_*/INSERT_NOP), gamma(index+1) plus an
// instruction encoding (INSERT_DEAD), or two 6-bit registers (RENAME_REG).
BitString serialize_certificate(BoundRule rule, std::span<const RewriteStep> chain);

struct CertSyntax {
    BoundRule rule = BoundRule::STEP_COUNTER;
    std::vector<RewriteStep> chain;
};
CertSyntax decode_certificate(BitReader& reader);  // throws codec::CodecError

// Canonical bound constructions.
std::optional<vm::Program> step_counter_bound(const vm::Program& subject);
vm::Program loop_free_const_bound(size_t instruction_count);
bool is_loop_free(const vm::Program& p);

// Largest register referenced nowhere in the program is reserved for the
// step-counter wrapper.
inline constexpr uint8_t kCounterRegister = 63;

struct CheckResult {
    bool valid = false;
    std::string reason;
    size_t failing_step = SIZE_MAX;       // chain index of first failure
    uint64_t cost = 0;                    // metered checker work (A-steps)
    std::optional<Certificate> cert;      // set when valid
};

CheckResult check_certificate(const vm::Program& pstar, BoundRule rule,
                              std::span<const RewriteStep> chain);

// Published constant c: the metered decode+check cost of any candidate of
// serialization size s against a reference program of n instructions is
// at most c(n) * s^2. Verified by the enumeration cost tests.
uint64_t checker_quadratic_constant(size_t pstar_instruction_count);

// ---- proof sources ---------------------------------------------------------

struct ProofEvent {
    uint64_t a_step = 0;  // A-step at which the certificate was emitted
    vm::Program p;
    vm::Program t;
    std::optional<Certificate> cert;  // nullopt for axiom-trusted entries
    size_t script_index = SIZE_MAX;
};

// Single-consumer, stateful, deterministic stream of proof events.
class ProofSource {
public:
    virtual ~ProofSource() = default;
    // Grants exactly `budget` A-steps and appends events completed in them.
    virtual void advance(uint64_t budget, std::vector<ProofEvent>& out) = 0;
    virtual uint64_t a_steps_consumed() const = 0;
};

// Every decodable certificate serialization of exactly `len` bits, in
// lexicographic order.
void walk_certificate_serializations(size_t len,
                                     const std::function<void(const BitString&)>& fn);

// Enumerates candidates in (length, lex) order of their serializations,
// charging decode+check cost; valid certificates become events.
class EnumerateSource final : public ProofSource {
public:
    explicit EnumerateSource(vm::Program pstar);
    void advance(uint64_t budget, std::vector<ProofEvent>& out) override;
    uint64_t a_steps_consumed() const override { return consumed_; }

private:
    struct Candidate {
        uint64_t cost = 0;
        bool valid = false;
        Certificate cert;
    };
    void load_next_candidate();

    vm::Program pstar_;
    uint64_t consumed_ = 0;
    uint64_t paid_ = 0;
    std::optional<Candidate> current_;
    size_t level_len_ = 2;
    std::vector<BitString> level_;
    size_t level_pos_ = 0;
};

class ScriptError : public std::runtime_error {
public:
    explicit ScriptError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ScriptEntry {
    uint64_t a_step = 0;
    bool trusted = false;        // axiom-trusted: no chain, taken as-is
    bool declared_valid = true;  // must match re-validation for untrusted entries
    BoundRule rule = BoundRule::STEP_COUNTER;
    std::vector<RewriteStep> chain;
    std::optional<vm::Program> p;  // required for trusted; cross-check otherwise
    std::optional<vm::Program> t;
};

// Emits scripted entries at their a_steps. Untrusted entries are re-validated
// with check_certificate at construction; any mismatch with declared_valid,
// unsorted a_steps, or p/t cross-check failure throws ScriptError.
class ScriptedSource final : public ProofSource {
public:
    ScriptedSource(vm::Program pstar, std::vector<ScriptEntry> script);
    void advance(uint64_t budget, std::vector<ProofEvent>& out) override;
    uint64_t a_steps_consumed() const override { return consumed_; }

private:
    uint64_t consumed_ = 0;
    std::vector<ProofEvent> pending_;  // validated events in emission order
    size_t next_ = 0;
};

}  // namespace mpstar::proofs
