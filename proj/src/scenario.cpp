#include "mpstar/scenario.hpp"

#include <fstream>
#include <numeric>

#include <json.hpp>

#include "mpstar/asm.hpp"

namespace mpstar::engine {

using nlohmann::json;

CycleSlots cycle_slots(const Shares& shares) {
    if (shares.a == 0 || shares.b == 0 || shares.c == 0)
        throw ScenarioError("shares must be positive");
    if (shares.a + shares.b + shares.c != 100)
        throw ScenarioError("shares must sum to 100");
    const unsigned g = std::gcd(std::gcd(shares.a, shares.b), shares.c);
    return CycleSlots{shares.a / g, shares.b / g, shares.c / g};
}

std::vector<proofs::RewriteStep> parse_chain(const std::vector<std::string>& steps) {
    std::vector<proofs::RewriteStep> chain;
    chain.reserve(steps.size());
    for (const std::string& s : steps) chain.push_back(proofs::parse_rewrite_step(s));
    return chain;
}

namespace {

vm::Program load_referenced_program(const json& j, const std::filesystem::path& base,
                                    const std::string& field) {
    if (!j.contains(field)) throw ScenarioError("missing field '" + field + "'");
    const auto& v = j.at(field);
    if (!v.is_string()) throw ScenarioError("field '" + field + "' must be a path string");
    return assembly::load_program_file(base / v.get<std::string>());
}

proofs::BoundRule parse_rule(const std::string& s) {
    if (s == "STEP_COUNTER") return proofs::BoundRule::STEP_COUNTER;
    if (s == "LOOP_FREE_CONST") return proofs::BoundRule::LOOP_FREE_CONST;
    throw ScenarioError("unknown bound rule '" + s + "'");
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ScenarioError(path.string() + ": " + e.what());
    }

    const std::filesystem::path base = path.parent_path();
    Scenario sc;
    try {
        sc.name = j.value("name", path.stem().string());
        sc.pstar = load_referenced_program(j, base, "pstar");
        if (!j.contains("input")) throw ScenarioError("missing field 'input'");
        sc.input = j.at("input").get<uint64_t>();
        sc.ceiling = j.value("ceiling", sc.ceiling);
        if (j.contains("shares")) {
            const auto& sh = j.at("shares");
            if (!sh.is_array() || sh.size() != 3)
                throw ScenarioError("shares must be an array of three percentages");
            sc.shares = Shares{sh[0].get<unsigned>(), sh[1].get<unsigned>(),
                               sh[2].get<unsigned>()};
        }
        cycle_slots(sc.shares);  // validate early

        const std::string source = j.value("source", "enumerate");
        if (source == "enumerate")
            sc.source = Scenario::SourceKind::ENUMERATE;
        else if (source == "scripted")
            sc.source = Scenario::SourceKind::SCRIPTED;
        else
            throw ScenarioError("unknown source kind '" + source + "'");

        if (j.contains("script")) {
            if (sc.source != Scenario::SourceKind::SCRIPTED)
                throw ScenarioError("script entries require source = scripted");
            for (const auto& je : j.at("script")) {
                proofs::ScriptEntry e;
                if (!je.contains("a_step")) throw ScenarioError("script entry missing a_step");
                e.a_step = je.at("a_step").get<uint64_t>();
                e.trusted = je.value("trusted", false);
                e.declared_valid = je.value("declared_valid", true);
                if (je.contains("rule")) e.rule = parse_rule(je.at("rule").get<std::string>());
                if (je.contains("chain")) {
                    std::vector<std::string> steps =
                        je.at("chain").get<std::vector<std::string>>();
                    e.chain = parse_chain(steps);
                }
                if (je.contains("p")) e.p = load_referenced_program(je, base, "p");
                if (je.contains("t")) e.t = load_referenced_program(je, base, "t");
                sc.script.push_back(std::move(e));
            }
        }
        if (j.contains("designated")) sc.designated = j.at("designated").get<size_t>();
    } catch (const json::exception& e) {
        throw ScenarioError(path.string() + ": " + e.what());
    }
    return sc;
}

}  // namespace mpstar::engine
