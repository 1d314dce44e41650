#include <doctest.h>

#include <map>
#include <set>

#include "test_util.hpp"

#include "mpstar/proofs.hpp"

using namespace mpstar;
using proofs::BoundRule;
using proofs::RewriteStep;
using proofs::StepKind;

namespace {

// Every input a demo scenario can feed a program.
constexpr uint64_t kIoCeiling = 2'000'000;

bool agree_on_small_inputs(const vm::Program& a, const vm::Program& b) {
    for (uint64_t x = 0; x <= 63; ++x) {
        const auto ra = vm::run_metered(a, x, kIoCeiling);
        const auto rb = vm::run_metered(b, x, kIoCeiling);
        if (ra.kind != rb.kind) return false;
        if (ra.kind == vm::RunOutcome::Kind::HALTED && ra.output != rb.output) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("empty chain proves (p*, step-counter bound) for any reference program") {
    for (const char* name : {"halt.asm", "double.asm", "succ_dead.asm", "slow_identity.asm"}) {
        const auto pstar = testutil::load_program(name);
        const auto res = proofs::check_certificate(pstar, BoundRule::STEP_COUNTER, {});
        REQUIRE(res.valid);
        CHECK(res.cert->subject == pstar);
        // The canonical wrapper outputs the exact step count of the subject.
        for (uint64_t x : {0ull, 1ull, 4ull, 9ull, 63ull}) {
            const auto steps = vm::count_steps(pstar, x, kIoCeiling);
            REQUIRE(steps.has_value());
            const auto bound_run = vm::run_metered(res.cert->bound, x, 80 * kIoCeiling);
            REQUIRE(bound_run.kind == vm::RunOutcome::Kind::HALTED);
            CHECK(bound_run.output == *steps);
        }
    }
}

TEST_CASE("deleting an unreachable block yields a shorter valid subject") {
    const auto pstar = testutil::load_program("double_dead.asm");
    const std::vector<RewriteStep> chain = {proofs::parse_rewrite_step("dd 10"),
                                            proofs::parse_rewrite_step("dd 10")};
    const auto res = proofs::check_certificate(pstar, BoundRule::STEP_COUNTER, chain);
    REQUIRE(res.valid);
    CHECK(res.cert->subject.length_bits() < pstar.length_bits());
    CHECK(res.cert->subject == testutil::load_program("double.asm"));
    CHECK(agree_on_small_inputs(pstar, res.cert->subject));
}

TEST_CASE("deleting a reachable instruction is rejected") {
    const auto pstar = testutil::load_program("succ_dead.asm");
    const std::vector<RewriteStep> chain = {proofs::parse_rewrite_step("dd 0")};
    const auto res = proofs::check_certificate(pstar, BoundRule::STEP_COUNTER, chain);
    CHECK_FALSE(res.valid);
    CHECK(res.failing_step == 0);
}

TEST_CASE("nop insertion and removal preserve behaviour") {
    const auto pstar = testutil::load_program("double.asm");
    const std::vector<RewriteStep> chain = {proofs::parse_rewrite_step("in 3")};
    const auto res = proofs::check_certificate(pstar, BoundRule::STEP_COUNTER, chain);
    REQUIRE(res.valid);
    CHECK(res.cert->subject.size() == pstar.size() + 1);
    CHECK(agree_on_small_inputs(pstar, res.cert->subject));

    // Undo it.
    const std::vector<RewriteStep> undo = {proofs::parse_rewrite_step("in 3"),
                                           proofs::parse_rewrite_step("dn 3")};
    const auto back = proofs::check_certificate(pstar, BoundRule::STEP_COUNTER, undo);
    REQUIRE(back.valid);
    CHECK(back.cert->subject == pstar);
}

TEST_CASE("register renaming requires an occurring source and a fresh destination") {
    const auto pstar = testutil::load_program("double.asm");  // uses r0, r1
    const auto ok = proofs::check_certificate(
        pstar, BoundRule::STEP_COUNTER, {{proofs::parse_rewrite_step("rr 1 9")}});
    REQUIRE(ok.valid);
    CHECK(agree_on_small_inputs(pstar, ok.cert->subject));
    CHECK(ok.cert->subject.length_bits() == pstar.length_bits());

    CHECK_FALSE(proofs::check_certificate(pstar, BoundRule::STEP_COUNTER,
                                          {{proofs::parse_rewrite_step("rr 5 9")}})
                    .valid);  // source unused
    CHECK_FALSE(proofs::check_certificate(pstar, BoundRule::STEP_COUNTER,
                                          {{proofs::parse_rewrite_step("rr 1 0")}})
                    .valid);  // destination is the i/o register
    CHECK_FALSE(proofs::check_certificate(pstar, BoundRule::STEP_COUNTER,
                                          {{proofs::parse_rewrite_step("rr 0 9")}})
                    .valid);  // source is the i/o register
}

TEST_CASE("loop-free rule demands forward jumps and bounds by length") {
    const auto succ = testutil::load_program("succ_dead.asm");  // only forward jumps
    const auto res = proofs::check_certificate(succ, BoundRule::LOOP_FREE_CONST, {});
    REQUIRE(res.valid);
    for (uint64_t x : {0ull, 5ull, 63ull}) {
        const auto bound_run = vm::run_metered(res.cert->bound, x, kIoCeiling);
        REQUIRE(bound_run.kind == vm::RunOutcome::Kind::HALTED);
        CHECK(bound_run.output == succ.size());
        const auto steps = vm::count_steps(succ, x, kIoCeiling);
        REQUIRE(steps.has_value());
        CHECK(*steps <= bound_run.output);
    }

    const auto loopy = testutil::load_program("double.asm");  // has backward jumps
    CHECK_FALSE(proofs::check_certificate(loopy, BoundRule::LOOP_FREE_CONST, {}).valid);
}

TEST_CASE("certificate serialization round-trips") {
    std::vector<RewriteStep> chain = {
        proofs::parse_rewrite_step("dd 10"), proofs::parse_rewrite_step("in 0"),
        proofs::parse_rewrite_step("id 3 JZ r0 7"), proofs::parse_rewrite_step("rr 3 9")};
    const auto bits = proofs::serialize_certificate(BoundRule::LOOP_FREE_CONST, chain);
    BitReader r(bits);
    const auto syntax = proofs::decode_certificate(r);
    CHECK(r.exhausted());
    CHECK(syntax.rule == BoundRule::LOOP_FREE_CONST);
    CHECK(syntax.chain == chain);
}

TEST_CASE("walker emits sorted, decodable, unique serializations") {
    for (size_t len = 2; len <= 18; ++len) {
        std::vector<BitString> all;
        proofs::walk_certificate_serializations(len, [&](const BitString& b) {
            CHECK(b.size() == len);
            BitReader r(b);
            CHECK_NOTHROW(proofs::decode_certificate(r));
            CHECK(r.exhausted());
            all.push_back(b);
        });
        for (size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1] < all[i]);
    }
}

TEST_CASE("first enumerated event is the empty-chain step-counter certificate") {
    const auto pstar = vm::make_program(
        {vm::Instruction{vm::Opcode::INC, 0, 0}, vm::Instruction{vm::Opcode::HALT, 0, 0}});
    proofs::EnumerateSource source(pstar);
    std::vector<proofs::ProofEvent> events;
    while (events.empty()) source.advance(16, events);
    CHECK(events[0].cert->chain.empty());
    CHECK(events[0].cert->bound_rule == BoundRule::STEP_COUNTER);
    CHECK(events[0].p == pstar);
    CHECK(events[0].cert->size_bits == 2);
}

TEST_CASE("enumerated event a_steps are nondecreasing and chunking-independent") {
    const auto pstar = testutil::load_program("identity_dead.asm");
    proofs::EnumerateSource fine(pstar);
    proofs::EnumerateSource coarse(pstar);
    std::vector<proofs::ProofEvent> fine_events, coarse_events;
    for (int i = 0; i < 20000; ++i) fine.advance(1, fine_events);
    coarse.advance(20000, coarse_events);
    REQUIRE(fine_events.size() == coarse_events.size());
    REQUIRE(fine_events.size() >= 2);
    uint64_t prev = 0;
    for (size_t i = 0; i < fine_events.size(); ++i) {
        CHECK(fine_events[i].a_step == coarse_events[i].a_step);
        CHECK(fine_events[i].p.bits == coarse_events[i].p.bits);
        CHECK(fine_events[i].a_step >= prev);
        prev = fine_events[i].a_step;
    }
}

namespace {

// Independent generator-and-checker: re-implements the rewrite rules from
// the documented semantics, builds abstract chains over the semantically
// possible step space (pruning at the first inapplicable step), and counts
// certificates whose serialization fits the cap.
using Instrs = std::vector<vm::Instruction>;

std::vector<bool> oracle_reachable(const Instrs& ins) {
    std::vector<bool> seen(ins.size(), false);
    bool changed = !ins.empty();
    if (!ins.empty()) seen[0] = true;
    while (changed) {  // fixpoint instead of a worklist
        changed = false;
        for (size_t i = 0; i < ins.size(); ++i) {
            if (!seen[i]) continue;
            auto mark = [&](size_t j) {
                if (j < ins.size() && !seen[j]) {
                    seen[j] = true;
                    changed = true;
                }
            };
            switch (ins[i].op) {
                case vm::Opcode::INC:
                case vm::Opcode::DEC: mark(i + 1); break;
                case vm::Opcode::JZ: mark(ins[i].target); mark(i + 1); break;
                case vm::Opcode::JMP: mark(ins[i].target); break;
                case vm::Opcode::HALT: break;
            }
        }
    }
    return seen;
}

std::optional<Instrs> oracle_apply(const Instrs& cur, const RewriteStep& s) {
    const uint32_t n = static_cast<uint32_t>(cur.size());
    Instrs out;
    switch (s.kind) {
        case StepKind::DELETE_DEAD: {
            if (s.index >= n) return std::nullopt;
            if (oracle_reachable(cur)[s.index]) return std::nullopt;
            for (uint32_t j = 0; j < n; ++j)
                if (j != s.index && vm::has_target(cur[j].op) && cur[j].target == s.index)
                    return std::nullopt;
            for (uint32_t j = 0; j < n; ++j) {
                if (j == s.index) continue;
                auto ins = cur[j];
                if (vm::has_target(ins.op) && ins.target > s.index) --ins.target;
                out.push_back(ins);
            }
            return out;
        }
        case StepKind::DELETE_NOP: {
            if (s.index >= n) return std::nullopt;
            if (cur[s.index].op != vm::Opcode::JMP || cur[s.index].target != s.index + 1)
                return std::nullopt;
            for (uint32_t j = 0; j < n; ++j) {
                if (j == s.index) continue;
                auto ins = cur[j];
                if (vm::has_target(ins.op) && ins.target > s.index) --ins.target;
                out.push_back(ins);
            }
            return out;
        }
        case StepKind::INSERT_NOP: {
            if (s.index >= n) return std::nullopt;
            for (uint32_t j = 0; j < n; ++j) {
                auto ins = cur[j];
                if (vm::has_target(ins.op) && ins.target >= s.index) ++ins.target;
                if (j == s.index)
                    out.push_back(vm::Instruction{vm::Opcode::JMP, 0, s.index + 1});
                out.push_back(ins);
            }
            return out;
        }
        case StepKind::INSERT_DEAD: {
            if (s.index > n) return std::nullopt;
            if (vm::has_target(s.instr.op) && s.instr.target >= n + 1) return std::nullopt;
            for (uint32_t j = 0; j <= n; ++j) {
                if (j == s.index) out.push_back(s.instr);
                if (j == n) break;
                auto ins = cur[j];
                if (vm::has_target(ins.op) && ins.target >= s.index) ++ins.target;
                out.push_back(ins);
            }
            if (oracle_reachable(out)[s.index]) return std::nullopt;
            return out;
        }
        case StepKind::RENAME_REG: {
            if (s.reg_from == 0 || s.reg_to == 0 || s.reg_from == s.reg_to) return std::nullopt;
            bool from_occurs = false, to_occurs = false;
            for (const auto& ins : cur)
                if (vm::has_reg(ins.op)) {
                    if (ins.reg == s.reg_from) from_occurs = true;
                    if (ins.reg == s.reg_to) to_occurs = true;
                }
            if (!from_occurs || to_occurs) return std::nullopt;
            out = cur;
            for (auto& ins : out)
                if (vm::has_reg(ins.op) && ins.reg == s.reg_from) ins.reg = s.reg_to;
            return out;
        }
    }
    return std::nullopt;
}

struct OracleCounter {
    size_t max_bits;
    size_t count = 0;
    size_t chain_len = 0;

    static size_t step_bits(const RewriteStep& s) {
        switch (s.kind) {
            case StepKind::DELETE_DEAD:
            case StepKind::DELETE_NOP:
            case StepKind::INSERT_NOP:
                return 3 + codec::gamma_length(s.index + 1);
            case StepKind::INSERT_DEAD: {
                size_t n = 3 + codec::gamma_length(s.index + 1) + vm::kOpcodeBits;
                if (vm::has_reg(s.instr.op)) n += vm::kRegBits;
                if (vm::has_target(s.instr.op))
                    n += codec::gamma_length(static_cast<uint64_t>(s.instr.target) + 1);
                return n;
            }
            case StepKind::RENAME_REG:
                return 15;
        }
        return 0;
    }

    void close(const Instrs& cur, size_t chain_bits) {
        if (1 + codec::gamma_length(chain_len + 1) + chain_bits > max_bits) return;
        bool uses_counter = false;
        for (const auto& ins : cur)
            if (vm::has_reg(ins.op) && ins.reg == proofs::kCounterRegister) uses_counter = true;
        if (!uses_counter) ++count;  // STEP_COUNTER certificate
        bool forward_only = true;
        for (uint32_t i = 0; i < cur.size(); ++i)
            if (vm::has_target(cur[i].op) && cur[i].target <= i) forward_only = false;
        if (forward_only) ++count;  // LOOP_FREE_CONST certificate
    }

    void extend(const Instrs& cur, size_t chain_bits) {
        close(cur, chain_bits);
        // gamma_length is nondecreasing in the chain length, so this lower
        // bounds every extension.
        if (1 + codec::gamma_length(chain_len + 2) + chain_bits + 4 > max_bits) return;
        const uint32_t n = static_cast<uint32_t>(cur.size());

        auto try_step = [&](const RewriteStep& s) {
            const size_t bits = step_bits(s);
            if (1 + codec::gamma_length(chain_len + 2) + chain_bits + bits > max_bits) return;
            const auto next = oracle_apply(cur, s);
            if (!next.has_value()) return;
            ++chain_len;
            extend(*next, chain_bits + bits);
            --chain_len;
        };

        for (uint32_t i = 0; i < n; ++i) {
            try_step(RewriteStep{StepKind::DELETE_DEAD, i, {}, 0, 0});
            try_step(RewriteStep{StepKind::DELETE_NOP, i, {}, 0, 0});
            try_step(RewriteStep{StepKind::INSERT_NOP, i, {}, 0, 0});
        }
        for (uint32_t i = 0; i <= n; ++i) {
            for (int op = 0; op <= 4; ++op) {
                RewriteStep s{StepKind::INSERT_DEAD, i, {}, 0, 0};
                s.instr.op = static_cast<vm::Opcode>(op);
                const unsigned regs = vm::has_reg(s.instr.op) ? vm::kRegisterCount : 1;
                const uint32_t targets = vm::has_target(s.instr.op) ? n + 1 : 1;
                for (unsigned r = 0; r < regs; ++r) {
                    s.instr.reg = static_cast<uint8_t>(r);
                    for (uint32_t t = 0; t < targets; ++t) {
                        s.instr.target = t;
                        try_step(s);
                    }
                }
            }
        }
        for (unsigned a = 1; a < vm::kRegisterCount; ++a)
            for (unsigned b = 1; b < vm::kRegisterCount; ++b) {
                if (a == b) continue;
                try_step(RewriteStep{StepKind::RENAME_REG, 0, {},
                                     static_cast<uint8_t>(a), static_cast<uint8_t>(b)});
            }
    }
};

}  // namespace

TEST_CASE("valid certificate count up to a size cap matches the brute-force oracle") {
    const auto pstar = vm::make_program(
        {vm::Instruction{vm::Opcode::INC, 0, 0}, vm::Instruction{vm::Opcode::HALT, 0, 0}});
    // The candidate space grows by roughly an order of magnitude per two
    // bits; 28 is the largest cap that keeps this cross-count quick.
    const size_t cap = 32;

    size_t via_walker = 0;
    for (size_t len = 2; len <= cap; ++len) {
        proofs::walk_certificate_serializations(len, [&](const BitString& bits) {
            BitReader r(bits);
            const auto syntax = proofs::decode_certificate(r);
            if (proofs::check_certificate(pstar, syntax.rule, syntax.chain).valid)
                ++via_walker;
        });
    }

    OracleCounter oracle{cap};
    oracle.extend(pstar.instructions, 0);
    CHECK(via_walker == oracle.count);
    CHECK(via_walker > 0);
}

TEST_CASE("enumerated certificates are sound and cheap to check") {
    const auto pstar = testutil::load_program("identity_dead.asm");
    const uint64_t c = proofs::checker_quadratic_constant(pstar.size());
    size_t checked = 0, valid = 0;
    for (size_t len = 2; len <= 22; ++len) {
        proofs::walk_certificate_serializations(len, [&](const BitString& bits) {
            BitReader r(bits);
            const auto syntax = proofs::decode_certificate(r);
            const auto res = proofs::check_certificate(pstar, syntax.rule, syntax.chain);
            ++checked;
            const uint64_t cost = bits.size() + res.cost;  // decode + check
            CHECK(cost <= c * bits.size() * bits.size());
            if (!res.valid) return;
            ++valid;
            CHECK(agree_on_small_inputs(pstar, res.cert->subject));
            // Spot-check the bound on a few inputs.
            for (uint64_t x : {0ull, 7ull, 63ull}) {
                const auto steps = vm::count_steps(res.cert->subject, x, kIoCeiling);
                REQUIRE(steps.has_value());
                const auto bound_run = vm::run_metered(res.cert->bound, x, 80 * kIoCeiling);
                REQUIRE(bound_run.kind == vm::RunOutcome::Kind::HALTED);
                CHECK(bound_run.output >= *steps);
            }
        });
    }
    CHECK(valid >= 3);
    CHECK(checked > valid);
}

TEST_CASE("scripted source emits entries at their a_steps") {
    const auto pstar = testutil::load_program("slow_identity.asm");
    std::vector<proofs::ScriptEntry> script(1);
    script[0].a_step = 100;
    script[0].trusted = true;
    script[0].p = testutil::load_program("halt.asm");
    script[0].t = testutil::load_program("inc0.asm");
    proofs::ScriptedSource source(pstar, script);
    std::vector<proofs::ProofEvent> events;
    source.advance(99, events);
    CHECK(events.empty());
    source.advance(1, events);
    REQUIRE(events.size() == 1);
    CHECK(events[0].a_step == 100);
    CHECK_FALSE(events[0].cert.has_value());
}

TEST_CASE("unsorted scripts are rejected") {
    const auto pstar = testutil::load_program("double.asm");
    std::vector<proofs::ScriptEntry> script(2);
    script[0].a_step = 50;
    script[1].a_step = 10;
    CHECK_THROWS_AS(proofs::ScriptedSource(pstar, script), proofs::ScriptError);
}

TEST_CASE("declared validity must match the checker") {
    const auto pstar = testutil::load_program("succ_dead.asm");
    std::vector<proofs::ScriptEntry> script(1);
    script[0].a_step = 5;
    script[0].declared_valid = true;
    script[0].chain = {proofs::parse_rewrite_step("dd 0")};  // reachable INC: invalid
    CHECK_THROWS_AS(proofs::ScriptedSource(pstar, script), proofs::ScriptError);

    script[0].declared_valid = false;  // now consistent: entry is skipped
    proofs::ScriptedSource source(pstar, script);
    std::vector<proofs::ProofEvent> events;
    source.advance(10, events);
    CHECK(events.empty());

    // An entry declared invalid that actually checks is inconsistent too.
    script[0].chain = {proofs::parse_rewrite_step("dd 2")};
    CHECK_THROWS_AS(proofs::ScriptedSource(pstar, script), proofs::ScriptError);
}

TEST_CASE("scripted p and t cross-checks") {
    const auto pstar = testutil::load_program("double_dead.asm");
    std::vector<proofs::ScriptEntry> script(1);
    script[0].a_step = 3;
    script[0].chain = {proofs::parse_rewrite_step("dd 10"),
                       proofs::parse_rewrite_step("dd 10")};
    script[0].p = testutil::load_program("double.asm");
    proofs::ScriptedSource ok(pstar, script);  // matching subject

    script[0].p = testutil::load_program("halt.asm");
    CHECK_THROWS_AS(proofs::ScriptedSource(pstar, script), proofs::ScriptError);
}
