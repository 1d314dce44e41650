#include "mpstar/codec.hpp"

#include <algorithm>
#include <bit>

#include "mpstar/vm.hpp"

namespace mpstar::codec {

static unsigned floor_log2(uint64_t n) {
    return 63u - static_cast<unsigned>(std::countl_zero(n));
}

void gamma_append(BitString& out, uint64_t n) {
    if (n == 0) throw CodecError(CodecErrorKind::MALFORMED, "gamma_encode: n must be >= 1");
    const unsigned z = floor_log2(n);
    for (unsigned i = 0; i < z; ++i) out.push_back(false);
    out.append_bits(n, z + 1);
}

BitString gamma_encode(uint64_t n) {
    BitString out;
    gamma_append(out, n);
    return out;
}

size_t gamma_length(uint64_t n) {
    if (n == 0) throw CodecError(CodecErrorKind::MALFORMED, "gamma_length: n must be >= 1");
    return 2u * floor_log2(n) + 1u;
}

uint64_t gamma_decode(BitReader& reader) {
    unsigned z = 0;
    while (true) {
        if (reader.exhausted())
            throw CodecError(CodecErrorKind::MALFORMED, "gamma_decode: truncated input");
        if (reader.read_bit()) break;
        if (++z > 63)
            throw CodecError(CodecErrorKind::MALFORMED, "gamma_decode: value out of range");
    }
    if (reader.remaining() < z)
        throw CodecError(CodecErrorKind::MALFORMED, "gamma_decode: truncated suffix");
    uint64_t v = 1;
    for (unsigned i = 0; i < z; ++i) v = (v << 1) | (reader.read_bit() ? 1u : 0u);
    return v;
}

GammaDecodeResult gamma_decode(const BitString& bits, size_t pos) {
    BitReader r(bits, pos);
    const uint64_t v = gamma_decode(r);
    return GammaDecodeResult{v, r.position() - pos};
}

KraftReport kraft_check(std::span<const BitString> codewords) {
    KraftReport report;
    std::vector<BitString> sorted(codewords.begin(), codewords.end());
    std::sort(sorted.begin(), sorted.end());
    // After sorting, a prefix is immediately followed by one of its extensions.
    for (size_t i = 0; i + 1 < sorted.size(); ++i) {
        if (sorted[i].is_prefix_of(sorted[i + 1])) {
            report.prefix_free = false;
            break;
        }
    }
    for (const BitString& w : sorted) report.sum += Dyadic::pow2_neg(w.size());
    report.within_bound = report.sum <= Dyadic::one();
    return report;
}

Dyadic kraft_sum(std::span<const BitString> codewords) {
    KraftReport report = kraft_check(codewords);
    if (!report.prefix_free)
        throw CodecError(CodecErrorKind::PREFIX_VIOLATION, "kraft_sum: code is not prefix-free");
    return report.sum;
}

PrefixCode::PrefixCode(std::vector<BitString> codewords) : codewords_(std::move(codewords)) {
    kraft_ = kraft_sum(codewords_);
    if (!(kraft_ <= Dyadic::one()))
        throw CodecError(CodecErrorKind::PREFIX_VIOLATION, "PrefixCode: Kraft sum exceeds 1");
}

PairWeight make_pair_weight(size_t p_len_bits, size_t t_len_bits) {
    PairWeight w;
    w.p_len_bits = p_len_bits;
    w.t_len_bits = t_len_bits;
    w.weight = Dyadic::pow2_neg(p_len_bits + t_len_bits);
    return w;
}

BitString encode_pair(const vm::Program& p, const vm::Program& t) {
    BitString out = p.bits;
    out.append(t.bits);
    return out;
}

std::pair<vm::Program, vm::Program> decode_pair(const BitString& bits) {
    BitReader r(bits);
    vm::Program p = vm::decode_program_prefix(r);
    vm::Program t = vm::decode_program_prefix(r);
    if (!r.exhausted())
        throw CodecError(CodecErrorKind::MALFORMED, "decode_pair: trailing bits");
    return {std::move(p), std::move(t)};
}

}  // namespace mpstar::codec
