#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "mpstar/vm.hpp"

namespace mpstar::assembly {

class AsmError : public std::runtime_error {
public:
    AsmError(size_t line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    size_t line() const { return line_; }

private:
    size_t line_ = 0;
};

// One instruction per line: `INC r3`, `JZ r0 L5`, `JMP 4`, `HALT`.
// Labels are identifiers followed by ':' on their own line or prefixing an
// instruction. Jump operands may be labels or absolute instruction indices.
// Comments start with '#' or ';'. The produced bits are the canonical codec
// encoding of the decoded instruction list.
vm::Program assemble(const std::string& text);

vm::Program load_program_file(const std::filesystem::path& path);

std::string disassemble(const vm::Program& p);

// Single instruction with numeric jump targets only (used in rewrite chains).
vm::Instruction parse_instruction(const std::string& text);
std::string instruction_to_string(const vm::Instruction& ins);

}  // namespace mpstar::assembly
