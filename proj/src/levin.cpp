#include "mpstar/levin.hpp"

#include <bit>

namespace mpstar::levin {

size_t simple_index(uint64_t n) {
    if (n == 0) throw std::invalid_argument("simple_index: n must be >= 1");
    return static_cast<size_t>(std::countr_zero(n)) + 1;
}

namespace {

struct Runner {
    enum class Phase { ABSENT, RUNNING, VERIFYING, DEAD };
    Phase phase = Phase::ABSENT;
    const vm::Program* program = nullptr;
    vm::MachineState st;
    uint64_t candidate = 0;
    uint64_t own_steps = 0;
    uint64_t verify_steps = 0;
};

}  // namespace

std::optional<SearchReport> simple_search(const InversionProblem& problem,
                                          ProgramSupply& programs, uint64_t ceiling) {
    std::vector<Runner> runners;
    for (uint64_t n = 1; n <= ceiling; ++n) {
        const size_t k = simple_index(n);
        if (k > runners.size()) {
            runners.resize(k);
            Runner& r = runners[k - 1];
            r.program = programs.get(k - 1);
            if (r.program) {
                r.phase = Runner::Phase::RUNNING;
                r.st = vm::fresh_state(problem.x);
            }
        }
        Runner& r = runners[k - 1];
        switch (r.phase) {
            case Runner::Phase::ABSENT:
            case Runner::Phase::DEAD:
                break;  // slot idles; the schedule position still elapses
            case Runner::Phase::RUNNING: {
                vm::RunOutcome out = vm::run_metered(*r.program, 1, r.st);
                r.st = out.state;
                ++r.own_steps;
                if (out.kind == vm::RunOutcome::Kind::HALTED) {
                    r.candidate = out.output;
                    r.phase = Runner::Phase::VERIFYING;
                    r.st = vm::fresh_state(r.candidate);
                }
                break;
            }
            case Runner::Phase::VERIFYING: {
                vm::RunOutcome out = vm::run_metered(problem.g, 1, r.st);
                r.st = out.state;
                ++r.verify_steps;
                if (out.kind == vm::RunOutcome::Kind::HALTED) {
                    if (out.output == problem.x) {
                        SearchReport report;
                        report.witness = r.candidate;
                        report.finder_index = k;
                        report.total_steps = n;
                        report.time_plus = r.own_steps + r.verify_steps;
                        return report;
                    }
                    r.phase = Runner::Phase::DEAD;
                }
                break;
            }
        }
    }
    return std::nullopt;
}

std::optional<SearchReport> search_phases(const InversionProblem& problem,
                                          ProgramSupply& programs, uint64_t ceiling,
                                          std::vector<PhaseAllotment>* allotments) {
    uint64_t total = 0;
    for (uint64_t i = 1; i <= 62; ++i) {
        for (size_t k = 0;; ++k) {
            const vm::Program* p = programs.get(k);
            if (!p) break;
            const size_t l = p->length_bits();
            if (l >= i) {
                if (programs.length_sorted()) break;  // canonical order: no longer ones either
                continue;
            }
            const uint64_t budget = 1ull << (i - l);  // floor(2^i * 2^-l), exact
            if (allotments) allotments->push_back(PhaseAllotment{i, k, l, budget});
            if (total >= ceiling) return std::nullopt;
            const uint64_t effective = std::min(budget, ceiling - total);

            vm::RunOutcome out = vm::run_metered(*p, problem.x, effective);
            const uint64_t used = out.state.steps_executed;
            total += used;
            if (out.kind == vm::RunOutcome::Kind::HALTED && used < effective) {
                vm::RunOutcome ver = vm::run_metered(problem.g, out.output, effective - used);
                total += ver.state.steps_executed;
                if (ver.kind == vm::RunOutcome::Kind::HALTED && ver.output == problem.x) {
                    SearchReport report;
                    report.witness = out.output;
                    report.finder_index = k + 1;
                    report.total_steps = total;
                    report.time_plus = used + ver.state.steps_executed;
                    return report;
                }
                // Wrong candidate or unverifiable within the phase budget:
                // state is discarded, the program restarts fresh next phase.
            }
            if (total >= ceiling) return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace mpstar::levin
