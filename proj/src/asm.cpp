#include "mpstar/asm.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace mpstar::assembly {

using vm::Instruction;
using vm::Opcode;

namespace {

std::string strip(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
    const size_t pos = line.find_first_of("#;");
    return pos == std::string::npos ? line : line.substr(0, pos);
}

std::vector<std::string> tokens(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

bool is_identifier(const std::string& s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

std::optional<Opcode> parse_opcode(const std::string& s) {
    if (s == "INC") return Opcode::INC;
    if (s == "DEC") return Opcode::DEC;
    if (s == "JZ") return Opcode::JZ;
    if (s == "JMP") return Opcode::JMP;
    if (s == "HALT") return Opcode::HALT;
    return std::nullopt;
}

uint8_t parse_register(const std::string& tok, size_t line) {
    if (tok.size() < 2 || tok[0] != 'r')
        throw AsmError(line, "expected register operand like r0, got '" + tok + "'");
    size_t pos = 0;
    unsigned long v = 0;
    try {
        v = std::stoul(tok.substr(1), &pos);
    } catch (const std::exception&) {
        throw AsmError(line, "bad register '" + tok + "'");
    }
    if (pos != tok.size() - 1 || v >= vm::kRegisterCount)
        throw AsmError(line, "register out of range (r0..r63): '" + tok + "'");
    return static_cast<uint8_t>(v);
}

struct PendingTarget {
    size_t instr_index;
    std::string label;  // empty when numeric
    uint64_t numeric = 0;
    size_t line;
};

}  // namespace

vm::Program assemble(const std::string& text) {
    std::vector<Instruction> instructions;
    std::map<std::string, uint32_t> labels;
    std::vector<PendingTarget> pending;

    std::istringstream is(text);
    std::string raw;
    size_t lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = strip(strip_comment(raw));
        // Leading labels, possibly several, possibly followed by an instruction.
        while (true) {
            const size_t colon = line.find(':');
            if (colon == std::string::npos) break;
            const std::string name = strip(line.substr(0, colon));
            if (!is_identifier(name)) throw AsmError(lineno, "bad label '" + name + "'");
            if (labels.count(name)) throw AsmError(lineno, "duplicate label '" + name + "'");
            labels[name] = static_cast<uint32_t>(instructions.size());
            line = strip(line.substr(colon + 1));
        }
        if (line.empty()) continue;

        const auto toks = tokens(line);
        const auto op = parse_opcode(toks[0]);
        if (!op) throw AsmError(lineno, "unknown mnemonic '" + toks[0] + "'");

        Instruction ins;
        ins.op = *op;
        size_t want = 1 + (vm::has_reg(*op) ? 1 : 0) + (vm::has_target(*op) ? 1 : 0);
        if (toks.size() != want)
            throw AsmError(lineno, "wrong operand count for " + toks[0]);
        size_t cursor = 1;
        if (vm::has_reg(*op)) ins.reg = parse_register(toks[cursor++], lineno);
        if (vm::has_target(*op)) {
            const std::string& t = toks[cursor];
            PendingTarget pt;
            pt.instr_index = instructions.size();
            pt.line = lineno;
            if (std::isdigit(static_cast<unsigned char>(t[0]))) {
                try {
                    pt.numeric = std::stoull(t);
                } catch (const std::exception&) {
                    throw AsmError(lineno, "bad jump target '" + t + "'");
                }
            } else if (is_identifier(t)) {
                pt.label = t;
            } else {
                throw AsmError(lineno, "bad jump target '" + t + "'");
            }
            pending.push_back(pt);
        }
        instructions.push_back(ins);
    }

    for (const PendingTarget& pt : pending) {
        uint64_t target;
        if (!pt.label.empty()) {
            auto it = labels.find(pt.label);
            if (it == labels.end())
                throw AsmError(pt.line, "undefined label '" + pt.label + "'");
            target = it->second;
        } else {
            target = pt.numeric;
        }
        if (target >= instructions.size())
            throw AsmError(pt.line, "jump target out of range: " + std::to_string(target));
        instructions[pt.instr_index].target = static_cast<uint32_t>(target);
    }

    if (instructions.empty()) throw AsmError(lineno, "empty program");
    return vm::make_program(std::move(instructions));
}

vm::Program load_program_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open program file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return assemble(ss.str());
    } catch (const AsmError& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

std::string instruction_to_string(const Instruction& ins) {
    switch (ins.op) {
        case Opcode::INC: return "INC r" + std::to_string(ins.reg);
        case Opcode::DEC: return "DEC r" + std::to_string(ins.reg);
        case Opcode::JZ:
            return "JZ r" + std::to_string(ins.reg) + " " + std::to_string(ins.target);
        case Opcode::JMP: return "JMP " + std::to_string(ins.target);
        case Opcode::HALT: return "HALT";
    }
    return "?";
}

vm::Instruction parse_instruction(const std::string& text) {
    const auto toks = tokens(strip(strip_comment(text)));
    if (toks.empty()) throw AsmError(1, "empty instruction");
    const auto op = parse_opcode(toks[0]);
    if (!op) throw AsmError(1, "unknown mnemonic '" + toks[0] + "'");
    Instruction ins;
    ins.op = *op;
    size_t want = 1 + (vm::has_reg(*op) ? 1 : 0) + (vm::has_target(*op) ? 1 : 0);
    if (toks.size() != want) throw AsmError(1, "wrong operand count for " + toks[0]);
    size_t cursor = 1;
    if (vm::has_reg(*op)) ins.reg = parse_register(toks[cursor++], 1);
    if (vm::has_target(*op)) {
        try {
            ins.target = static_cast<uint32_t>(std::stoull(toks[cursor]));
        } catch (const std::exception&) {
            throw AsmError(1, "bad numeric jump target '" + toks[cursor] + "'");
        }
    }
    return ins;
}

std::string disassemble(const vm::Program& p) {
    // Emit labels for every jump target so the output reassembles unchanged.
    std::vector<bool> is_target(p.instructions.size() + 1, false);
    for (const Instruction& ins : p.instructions)
        if (vm::has_target(ins.op)) is_target[ins.target] = true;

    std::ostringstream out;
    for (size_t i = 0; i < p.instructions.size(); ++i) {
        if (is_target[i]) out << "L" << i << ":\n";
        const Instruction& ins = p.instructions[i];
        out << "  ";
        switch (ins.op) {
            case Opcode::INC: out << "INC r" << unsigned(ins.reg); break;
            case Opcode::DEC: out << "DEC r" << unsigned(ins.reg); break;
            case Opcode::JZ: out << "JZ r" << unsigned(ins.reg) << " L" << ins.target; break;
            case Opcode::JMP: out << "JMP L" << ins.target; break;
            case Opcode::HALT: out << "HALT"; break;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace mpstar::assembly
