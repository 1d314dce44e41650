#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpstar/bits.hpp"
#include "mpstar/dyadic.hpp"

namespace mpstar::vm {
struct Program;
}

namespace mpstar::codec {

enum class CodecErrorKind { MALFORMED, BAD_TARGET, PREFIX_VIOLATION };

class CodecError : public std::runtime_error {
public:
    CodecError(CodecErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    CodecErrorKind kind() const { return kind_; }

private:
    CodecErrorKind kind_;
};

// Elias-gamma: floor(lg n) zeros followed by binary(n), MSB first. n >= 1.
BitString gamma_encode(uint64_t n);
void gamma_append(BitString& out, uint64_t n);
size_t gamma_length(uint64_t n);

// Inverse; consumes exactly the codeword. Throws MALFORMED on truncation.
uint64_t gamma_decode(BitReader& reader);

struct GammaDecodeResult {
    uint64_t value;
    size_t bits_consumed;
};
GammaDecodeResult gamma_decode(const BitString& bits, size_t pos = 0);

// Exact sum of 2^-len over the codewords. Throws PREFIX_VIOLATION if any
// codeword is a proper prefix of another (duplicates count as violations).
Dyadic kraft_sum(std::span<const BitString> codewords);

struct KraftReport {
    Dyadic sum;
    bool prefix_free = true;
    bool within_bound = true;  // sum <= 1
};
KraftReport kraft_check(std::span<const BitString> codewords);

// Prefix-free codeword set; validates both invariants on construction.
class PrefixCode {
public:
    explicit PrefixCode(std::vector<BitString> codewords);
    const std::vector<BitString>& codewords() const { return codewords_; }
    const Dyadic& kraft() const { return kraft_; }

private:
    std::vector<BitString> codewords_;
    Dyadic kraft_;
};

// Scheduler weight 2^-(l(p)+l(t)) for a (program, time bound) pair.
struct PairWeight {
    size_t p_len_bits = 0;
    size_t t_len_bits = 0;
    Dyadic weight;
};
PairWeight make_pair_weight(size_t p_len_bits, size_t t_len_bits);

// Concatenation of the two self-delimiting program encodings; prefix-free
// over the pair space, length l(p)+l(t).
BitString encode_pair(const vm::Program& p, const vm::Program& t);
std::pair<vm::Program, vm::Program> decode_pair(const BitString& bits);

}  // namespace mpstar::codec
