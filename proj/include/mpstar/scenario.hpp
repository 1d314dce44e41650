#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpstar/proofs.hpp"
#include "mpstar/vm.hpp"

namespace mpstar::engine {

// Component shares in percent; realized as a deterministic macro-cycle of
// (a/g, b/g, c/g) slots with g = gcd(a,b,c).
struct Shares {
    unsigned a = 10, b = 10, c = 80;
};

struct CycleSlots {
    uint64_t a = 1, b = 1, c = 8;
};

// Validates positivity and sum 100; reduces by the gcd.
CycleSlots cycle_slots(const Shares& shares);

class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(const std::string& msg) : std::runtime_error(msg) {}
};

// A reproducible M run: reference program, input, proof source, ceiling.
struct Scenario {
    enum class SourceKind { ENUMERATE, SCRIPTED };

    std::string name;
    vm::Program pstar;
    uint64_t input = 0;
    uint64_t ceiling = 10'000'000;  // global scheduler slots
    Shares shares;
    SourceKind source = SourceKind::ENUMERATE;
    std::vector<proofs::ScriptEntry> script;
    std::optional<size_t> designated;  // arrival order of the pair to verify
};

// JSON scenario file; program paths are resolved relative to the file.
Scenario load_scenario(const std::filesystem::path& path);

// Parses the textual form used in scenario files ("dd 2", "id 1 INC r5", ...).
std::vector<proofs::RewriteStep> parse_chain(const std::vector<std::string>& steps);

}  // namespace mpstar::engine
