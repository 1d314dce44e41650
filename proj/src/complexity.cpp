#include "mpstar/complexity.hpp"

#include <algorithm>

namespace mpstar::complexity {

K2Estimate k2_upper_bound(const vm::Program& pstar, uint64_t budget) {
    K2Estimate est;
    est.best_len_bits = pstar.length_bits();
    est.witness = pstar;
    est.trajectory.emplace_back(0, est.best_len_bits);

    // Budget-0 baseline: the empty-chain certificate for (p*, bound).
    proofs::CheckResult base =
        proofs::check_certificate(pstar, proofs::BoundRule::STEP_COUNTER, {});
    if (!base.valid) base = proofs::check_certificate(pstar, proofs::BoundRule::LOOP_FREE_CONST, {});
    if (base.valid) est.witness_cert = std::move(base.cert);

    proofs::EnumerateSource source(pstar);
    std::vector<proofs::ProofEvent> events;
    uint64_t remaining = budget;
    while (remaining > 0) {
        const uint64_t chunk = std::min<uint64_t>(remaining, 65536);
        events.clear();
        source.advance(chunk, events);
        remaining -= chunk;
        for (proofs::ProofEvent& ev : events) {
            const size_t len = ev.p.length_bits();
            if (len < est.best_len_bits) {
                est.best_len_bits = len;
                est.witness = ev.p;
                est.witness_cert = std::move(ev.cert);
                est.trajectory.emplace_back(ev.a_step, len);
            }
        }
    }
    est.budget_spent = budget;
    return est;
}

}  // namespace mpstar::complexity
