#include "mpstar/engine.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace mpstar::engine {

// ---- trace -------------------------------------------------------------------

const char* event_kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::PROOF_ADDED: return "PROOF_ADDED";
        case EventKind::TFAST_UPDATE: return "TFAST_UPDATE";
        case EventKind::PERIOD_START: return "PERIOD_START";
        case EventKind::HALT_OUTPUT: return "HALT_OUTPUT";
    }
    return "?";
}

static std::string event_payload(const TraceEvent& e) {
    switch (e.kind) {
        case EventKind::PROOF_ADDED:
            return "pair=" + std::to_string(e.pair) + ";lp=" + std::to_string(e.lp) +
                   ";lt=" + std::to_string(e.lt);
        case EventKind::TFAST_UPDATE:
            return "tfast=" + std::to_string(e.value) + ";pair=" + std::to_string(e.pair);
        case EventKind::PERIOD_START: return "k=" + std::to_string(e.value);
        case EventKind::HALT_OUTPUT: return "output=" + std::to_string(e.value);
    }
    return "";
}

std::string trace_to_csv(std::span<const TraceEvent> trace) {
    std::ostringstream out;
    out << "global_step,component,kind,payload\n";
    for (const TraceEvent& e : trace)
        out << e.global_step << ',' << e.component << ',' << event_kind_name(e.kind) << ','
            << event_payload(e) << '\n';
    return out.str();
}

std::string trace_to_ndjson(std::span<const TraceEvent> trace) {
    std::ostringstream out;
    for (const TraceEvent& e : trace) {
        out << "{\"global_step\":" << e.global_step << ",\"component\":\"" << e.component
            << "\",\"kind\":\"" << event_kind_name(e.kind) << "\"";
        switch (e.kind) {
            case EventKind::PROOF_ADDED:
                out << ",\"pair\":" << e.pair << ",\"lp\":" << e.lp << ",\"lt\":" << e.lt;
                break;
            case EventKind::TFAST_UPDATE:
                out << ",\"tfast\":" << e.value << ",\"pair\":" << e.pair;
                break;
            case EventKind::PERIOD_START:
                out << ",\"k\":" << e.value;
                break;
            case EventKind::HALT_OUTPUT:
                out << ",\"output\":" << e.value;
                break;
        }
        out << "}\n";
    }
    return out.str();
}

// ---- B scheduler ----------------------------------------------------------------

void BScheduler::add_task(size_t pair_index, vm::Program t, codec::PairWeight weight,
                          uint64_t input) {
    BTask task;
    task.pair_index = pair_index;
    task.t = std::move(t);
    task.weight = weight;
    task.st = vm::fresh_state(input);
    tasks_.push_back(std::move(task));
    live_sum_ += tasks_.back().weight.weight;
    ++live_count_;
}

BScheduler::TickResult BScheduler::tick() {
    ++ticks_;
    TickResult result;
    BTask* best = nullptr;
    for (BTask& task : tasks_) {
        if (task.done) continue;
        task.credit += task.weight.weight;
        if (!best || task.credit > best->credit) best = &task;  // ties keep earliest arrival
    }
    if (!best || best->credit.sign() <= 0) return result;

    vm::RunOutcome out = vm::run_metered(best->t, 1, best->st);
    best->st = out.state;
    ++best->executed;
    best->credit -= Dyadic::one();
    result.executed = true;
    result.pair_index = best->pair_index;
    if (out.kind == vm::RunOutcome::Kind::HALTED) {
        best->done = true;
        live_sum_ -= best->weight.weight;
        --live_count_;
        result.halted = true;
        result.value = out.output;
    }
    return result;
}

// ---- M run --------------------------------------------------------------------

namespace {

std::unique_ptr<proofs::ProofSource> make_source(const Scenario& sc) {
    if (sc.source == Scenario::SourceKind::ENUMERATE)
        return std::make_unique<proofs::EnumerateSource>(sc.pstar);
    return std::make_unique<proofs::ScriptedSource>(sc.pstar, sc.script);
}

struct CState {
    uint64_t k = 0;
    uint64_t used = 0;
    bool active = false;
    vm::Program prog;
    vm::MachineState st;
};

}  // namespace

RunResult run_mpstar(const Scenario& scenario, const EngineHooks* hooks) {
    const CycleSlots slots = cycle_slots(scenario.shares);
    auto source = make_source(scenario);

    RunResult result;
    RunStats& stats = result.stats;
    std::vector<TraceEvent>& trace = result.trace;

    std::set<std::pair<std::string, std::string>> seen;  // L is a set of pairs
    BScheduler bsched;
    std::optional<uint64_t> t_fast;  // nullopt = infinity
    vm::Program p_fast = scenario.pstar;
    CState cexec;

    uint64_t global = 0;
    std::vector<proofs::ProofEvent> events;

    auto finish = [&](RunResult::Status status, uint64_t output) {
        result.status = status;
        result.output = output;
        stats.total_steps = global;
        stats.t_fast_final = t_fast;
        return std::move(result);
    };

    while (true) {
        // A: proof arrival
        for (uint64_t s = 0; s < slots.a; ++s) {
            if (global == scenario.ceiling)
                return finish(RunResult::Status::CEILING_EXCEEDED, 0);
            ++global;
            ++stats.a_steps;
            events.clear();
            source->advance(1, events);
            for (proofs::ProofEvent& ev : events) {
                auto key = std::make_pair(ev.p.bits.to_string(), ev.t.bits.to_string());
                if (!seen.insert(std::move(key)).second) continue;
                PairRecord rec;
                rec.p = std::move(ev.p);
                rec.t = std::move(ev.t);
                rec.arrival_order = stats.pairs.size();
                rec.arrival_step = global;
                rec.trusted = !ev.cert.has_value();
                rec.cert = std::move(ev.cert);
                rec.weight = codec::make_pair_weight(rec.p.length_bits(), rec.t.length_bits());
                bsched.add_task(rec.arrival_order, rec.t, rec.weight, scenario.input);
                if (bsched.live_weight_sum() > Dyadic::one())
                    throw std::logic_error("Kraft invariant violated in B scheduler");
                TraceEvent te;
                te.global_step = global;
                te.component = 'A';
                te.kind = EventKind::PROOF_ADDED;
                te.pair = rec.arrival_order;
                te.lp = rec.p.length_bits();
                te.lt = rec.t.length_bits();
                trace.push_back(te);
                stats.pairs.push_back(std::move(rec));
            }
        }
        // B: time-bound evaluation
        for (uint64_t s = 0; s < slots.b; ++s) {
            if (global == scenario.ceiling)
                return finish(RunResult::Status::CEILING_EXCEEDED, 0);
            ++global;
            ++stats.b_steps;
            BScheduler::TickResult tick = bsched.tick();
            if (hooks && hooks->on_b_tick) hooks->on_b_tick(BTickProbe{global, bsched});
            if (tick.halted) {
                PairRecord& rec = stats.pairs[tick.pair_index];
                rec.evaluated = true;
                rec.eval_value = tick.value;
                rec.eval_step = global;
                if (!t_fast.has_value() || tick.value < *t_fast) {
                    t_fast = tick.value;
                    p_fast = rec.p;
                    stats.last_update_step = global;
                    TraceEvent te;
                    te.global_step = global;
                    te.component = 'B';
                    te.kind = EventKind::TFAST_UPDATE;
                    te.value = tick.value;
                    te.pair = tick.pair_index;
                    trace.push_back(te);
                }
            }
        }
        // C: doubling execution of the currently fastest program
        for (uint64_t s = 0; s < slots.c; ++s) {
            if (global == scenario.ceiling)
                return finish(RunResult::Status::CEILING_EXCEEDED, 0);
            ++global;
            ++stats.c_steps;
            if (!cexec.active) {
                cexec.k = cexec.k == 0 ? 1 : 2 * cexec.k;
                cexec.used = 0;
                cexec.prog = p_fast;
                cexec.st = vm::fresh_state(scenario.input);
                cexec.active = true;
                TraceEvent te;
                te.global_step = global;
                te.component = 'C';
                te.kind = EventKind::PERIOD_START;
                te.value = cexec.k;
                trace.push_back(te);
            }
            vm::RunOutcome out = vm::run_metered(cexec.prog, 1, cexec.st);
            cexec.st = out.state;
            ++cexec.used;
            if (out.kind == vm::RunOutcome::Kind::HALTED) {
                TraceEvent te;
                te.global_step = global;
                te.component = 'C';
                te.kind = EventKind::HALT_OUTPUT;
                te.value = out.output;
                trace.push_back(te);
                return finish(RunResult::Status::HALTED, out.output);
            }
            if (cexec.used == cexec.k) cexec.active = false;  // fresh start next period
        }
        ++stats.macro_cycles;
    }
}

// ---- Theorem 1 verification ------------------------------------------------------

namespace {
constexpr uint64_t kEvalCeiling = 1'000'000'000;
}

BoundReport verify_theorem1_bound(const Scenario& scenario, size_t designated_pair) {
    RunResult run = run_mpstar(scenario);
    if (run.status != RunResult::Status::HALTED)
        throw BoundError("scenario exceeded its step ceiling");

    if (designated_pair >= run.stats.pairs.size())
        throw BoundError("designated pair " + std::to_string(designated_pair) +
                         " not present (list has " + std::to_string(run.stats.pairs.size()) +
                         " entries)");
    const PairRecord& rec = run.stats.pairs[designated_pair];
    if (!rec.cert.has_value())
        throw BoundError("designated pair is axiom-trusted; the bound needs a certificate");

    BoundReport rep;
    rep.total_steps = run.stats.total_steps;
    rep.c_steps = run.stats.c_steps;
    rep.t_fast_final = run.stats.t_fast_final;
    rep.last_update_step = run.stats.last_update_step;
    rep.pair_index = designated_pair;

    vm::RunOutcome eval = vm::run_metered(rec.t, scenario.input, kEvalCeiling);
    if (eval.kind != vm::RunOutcome::Kind::HALTED)
        throw BoundError("designated time bound did not halt within the evaluation ceiling");
    rep.t_p_x = eval.output;
    rep.time_t_x = eval.state.steps_executed;

    rep.l_p = rec.p.length_bits();
    rep.l_t = rec.t.length_bits();
    rep.l_proof = rec.cert->size_bits;
    rep.checker_constant = proofs::checker_quadratic_constant(scenario.pstar.size());

    rep.d_p = 40 * pow2(rep.l_p + rep.l_t);
    rep.c_p = 40 * pow2(rep.l_proof + 1) * BigNat(rep.checker_constant) *
              BigNat(static_cast<unsigned long>(rep.l_proof)) *
              BigNat(static_cast<unsigned long>(rep.l_proof));
    rep.bound = 5 * BigNat(static_cast<unsigned long>(rep.t_p_x)) +
                rep.d_p * BigNat(static_cast<unsigned long>(rep.time_t_x)) + rep.c_p;
    rep.holds = BigNat(static_cast<unsigned long>(rep.total_steps)) <= rep.bound;

    rep.designated_evaluated_in_run = rec.evaluated;
    rep.t_b_designated = rec.evaluated ? rec.eval_step : run.stats.total_steps;
    const BigNat four_tb = 4 * BigNat(static_cast<unsigned long>(rep.t_b_designated));
    const BigNat five_tp = 5 * BigNat(static_cast<unsigned long>(rep.t_p_x));
    rep.intermediate_rhs = std::max(four_tb, five_tp);
    rep.intermediate_holds =
        BigNat(static_cast<unsigned long>(rep.total_steps)) <= rep.intermediate_rhs;

    if (run.stats.t_fast_final.has_value()) {
        const uint64_t rhs_a = 4 * run.stats.last_update_step;
        const uint64_t rhs_b = 5 * *run.stats.t_fast_final;
        rep.case_holds = rep.c_steps <= std::max(rhs_a, rhs_b);
    } else {
        rep.case_vacuous = true;
        rep.case_holds = true;
    }

    if (rec.p == scenario.pstar && rec.cert->bound_rule == proofs::BoundRule::STEP_COUNTER) {
        auto steps = vm::count_steps(scenario.pstar, scenario.input, kEvalCeiling);
        if (steps.has_value()) {
            rep.time_pstar = *steps;
            const BigNat rhs = (rep.d_p + 5) * BigNat(static_cast<unsigned long>(*steps)) +
                               rep.c_p;
            rep.dp5_holds = BigNat(static_cast<unsigned long>(rep.total_steps)) <= rhs;
        }
    }
    return rep;
}

std::string bound_report_to_string(const BoundReport& r) {
    std::ostringstream out;
    out << "designated pair " << r.pair_index << ": l(p)=" << r.l_p << " l(t)=" << r.l_t
        << " l(proof)=" << r.l_proof << "\n";
    out << "measured: total_steps=" << r.total_steps << " c_steps=" << r.c_steps
        << " t_p(x)=" << r.t_p_x << " time_t(x)=" << r.time_t_x << "\n";
    out << "constants: checker_c=" << r.checker_constant << " d_p=" << r.d_p.get_str()
        << " c_p=" << r.c_p.get_str() << "\n";
    out << "bound 5*t_p + d_p*time_t + c_p = " << r.bound.get_str() << "\n";
    out << "theorem-1 inequality: " << (r.holds ? "PASS" : "FAIL") << "\n";
    out << "intermediate total<=max{4*T_B," << 5 * r.t_p_x
        << "}: T_B=" << r.t_b_designated
        << (r.designated_evaluated_in_run ? "" : " (pair unfinished: T_B=total)") << " rhs="
        << r.intermediate_rhs.get_str() << " "
        << (r.intermediate_holds ? "PASS" : "FAIL") << "\n";
    out << "case analysis C<=max{4*T_B_last,5*t_fast}: ";
    if (r.case_vacuous)
        out << "PASS (no t_fast update; bound vacuous)\n";
    else
        out << (r.case_holds ? "PASS" : "FAIL") << " (T_B_last=" << r.last_update_step
            << " t_fast=" << *r.t_fast_final << ")\n";
    if (r.dp5_holds.has_value())
        out << "(d_p+5)-factor variant vs time_p*=" << r.time_pstar << ": "
            << (*r.dp5_holds ? "PASS" : "FAIL") << "\n";
    return out.str();
}

// ---- Theorem 2 wrapper -------------------------------------------------------------

BitString wrapped_description_prefix() {
    BitString prefix;
    codec::gamma_append(prefix, 1);  // description format version
    const Shares shares;             // the wrapper fixes the default split
    codec::gamma_append(prefix, shares.a);
    codec::gamma_append(prefix, shares.b);
    codec::gamma_append(prefix, shares.c);
    prefix.push_back(false);  // source kind: enumerate
    return prefix;
}

WrappedProgram build_fastest_shortest(const vm::Program& pstar, uint64_t budget) {
    WrappedProgram wrapped;
    wrapped.search = complexity::k2_upper_bound(pstar, budget);
    wrapped.inner = wrapped.search.witness;
    wrapped.description = wrapped_description_prefix();
    wrapped.overhead_bits = wrapped.description.size();
    wrapped.description.append(wrapped.inner.bits);
    return wrapped;
}

WrappedDecode decode_wrapped(const BitString& description) {
    BitReader r(description);
    const uint64_t version = codec::gamma_decode(r);
    if (version != 1)
        throw codec::CodecError(codec::CodecErrorKind::MALFORMED,
                                "unknown wrapped description version");
    WrappedDecode out;
    out.shares.a = static_cast<unsigned>(codec::gamma_decode(r));
    out.shares.b = static_cast<unsigned>(codec::gamma_decode(r));
    out.shares.c = static_cast<unsigned>(codec::gamma_decode(r));
    if (r.exhausted())
        throw codec::CodecError(codec::CodecErrorKind::MALFORMED, "truncated description");
    out.source = r.read_bit() ? Scenario::SourceKind::SCRIPTED : Scenario::SourceKind::ENUMERATE;
    out.inner = vm::decode_program_prefix(r);
    if (!r.exhausted())
        throw codec::CodecError(codec::CodecErrorKind::MALFORMED,
                                "trailing bits after wrapped program");
    return out;
}

}  // namespace mpstar::engine
