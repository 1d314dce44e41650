#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mpstar/codec.hpp"
#include "mpstar/complexity.hpp"
#include "mpstar/dyadic.hpp"
#include "mpstar/scenario.hpp"
#include "mpstar/vm.hpp"

namespace mpstar::engine {

// ---- trace -----------------------------------------------------------------

enum class EventKind { PROOF_ADDED, TFAST_UPDATE, PERIOD_START, HALT_OUTPUT };

const char* event_kind_name(EventKind kind);

struct TraceEvent {
    uint64_t global_step = 0;
    char component = '?';  // 'A' | 'B' | 'C'
    EventKind kind = EventKind::PROOF_ADDED;
    uint64_t value = 0;      // new t_fast / period size k / output
    size_t pair = SIZE_MAX;  // arrival order, PROOF_ADDED and TFAST_UPDATE
    size_t lp = 0, lt = 0;   // encoding lengths, PROOF_ADDED only
};

std::string trace_to_csv(std::span<const TraceEvent> trace);
std::string trace_to_ndjson(std::span<const TraceEvent> trace);

// ---- B component: Kraft-weighted time-bound evaluation ----------------------

struct BTask {
    size_t pair_index = 0;  // arrival order of the (p, t) entry
    vm::Program t;
    codec::PairWeight weight;
    vm::MachineState st;
    Dyadic credit;
    bool done = false;
    uint64_t executed = 0;  // VM steps granted so far
};

// Max-credit weighted round-robin with exact dyadic credits: each tick every
// live task gains its weight; the highest-credit task (ties: earliest
// arrival) runs one VM step if its credit is strictly positive, paying 1.
class BScheduler {
public:
    void add_task(size_t pair_index, vm::Program t, codec::PairWeight weight, uint64_t input);

    struct TickResult {
        bool executed = false;
        size_t pair_index = SIZE_MAX;
        bool halted = false;
        uint64_t value = 0;
    };
    TickResult tick();

    const std::vector<BTask>& tasks() const { return tasks_; }
    const Dyadic& live_weight_sum() const { return live_sum_; }
    size_t live_count() const { return live_count_; }
    uint64_t ticks() const { return ticks_; }

private:
    std::vector<BTask> tasks_;
    Dyadic live_sum_;
    size_t live_count_ = 0;
    uint64_t ticks_ = 0;
};

// ---- M run ------------------------------------------------------------------

struct PairRecord {
    vm::Program p, t;
    size_t arrival_order = 0;
    uint64_t arrival_step = 0;  // global step of PROOF_ADDED
    bool trusted = false;
    std::optional<proofs::Certificate> cert;
    codec::PairWeight weight;
    bool evaluated = false;     // B finished running t on x
    uint64_t eval_value = 0;    // U(t, x)
    uint64_t eval_step = 0;     // global step of the evaluation tick
};

struct RunStats {
    uint64_t total_steps = 0;
    uint64_t a_steps = 0, b_steps = 0, c_steps = 0;
    uint64_t macro_cycles = 0;  // completed cycles
    std::optional<uint64_t> t_fast_final;  // nullopt: still infinity
    uint64_t last_update_step = 0;         // global step of the last TFAST_UPDATE
    std::vector<PairRecord> pairs;         // the list L, in arrival order
};

struct RunResult {
    enum class Status { HALTED, CEILING_EXCEEDED };
    Status status = Status::CEILING_EXCEEDED;
    uint64_t output = 0;
    RunStats stats;
    std::vector<TraceEvent> trace;
};

struct BTickProbe {
    uint64_t global_step;
    const BScheduler& scheduler;
};

struct EngineHooks {
    std::function<void(const BTickProbe&)> on_b_tick;
};

// The full construction: interleaves proof arrival (A), Kraft-weighted bound
// evaluation (B) and doubling execution of the currently fastest program (C)
// at the configured shares until C prints the output.
RunResult run_mpstar(const Scenario& scenario, const EngineHooks* hooks = nullptr);

// ---- Theorem 1 bound verification --------------------------------------------

struct BoundReport {
    // measured
    uint64_t total_steps = 0;
    uint64_t c_steps = 0;
    std::optional<uint64_t> t_fast_final;
    uint64_t last_update_step = 0;
    // designated pair
    size_t pair_index = 0;
    uint64_t t_p_x = 0;     // U(t, x)
    uint64_t time_t_x = 0;  // steps of that evaluation
    size_t l_p = 0, l_t = 0, l_proof = 0;
    uint64_t checker_constant = 0;
    bool designated_evaluated_in_run = false;
    uint64_t t_b_designated = 0;  // eval step, or total_steps when unfinished
    // main inequality: total_steps <= 5 t_p(x) + d_p time_t(x) + c_p
    BigNat d_p, c_p, bound;
    bool holds = false;
    // intermediate: total_steps <= max{4 T_B, 5 t_p(x)}
    BigNat intermediate_rhs;
    bool intermediate_holds = false;
    // case analysis: C-steps <= max{4 T_B_last, 5 t_fast_final} (vacuous when
    // t_fast stayed infinite)
    bool case_holds = false;
    bool case_vacuous = false;
    // p == p* with a step-counter bound: total <= (d_p + 5) time_p*(x) + c_p
    std::optional<bool> dp5_holds;
    uint64_t time_pstar = 0;
};

class BoundError : public std::runtime_error {
public:
    explicit BoundError(const std::string& msg) : std::runtime_error(msg) {}
};

// Runs the scenario, measures t_p(x) and time_{t_p}(x) with direct metered
// runs, computes the constants from the designated pair's encoding lengths
// and certificate size, and checks every inequality. Throws BoundError when
// the run exceeds its ceiling or the pair is not certified.
BoundReport verify_theorem1_bound(const Scenario& scenario, size_t designated_pair);

std::string bound_report_to_string(const BoundReport& report);

// ---- Theorem 2 wrapper ---------------------------------------------------------

struct WrappedProgram {
    BitString description;       // canonical serialization of M around `inner`
    vm::Program inner;           // shortest certified-equivalent program found
    size_t overhead_bits = 0;    // fixed wrapper overhead W
    complexity::K2Estimate search;
};

// Fixed-layout description header: version, shares, source kind. Its length
// is the published wrapper overhead W.
BitString wrapped_description_prefix();

WrappedProgram build_fastest_shortest(const vm::Program& pstar, uint64_t budget);

struct WrappedDecode {
    Shares shares;
    Scenario::SourceKind source = Scenario::SourceKind::ENUMERATE;
    vm::Program inner;
};
WrappedDecode decode_wrapped(const BitString& description);

}  // namespace mpstar::engine
