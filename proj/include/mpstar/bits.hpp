#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpstar {

// Bit string with one byte per bit (values 0/1), MSB-first conventions.
// Sized for desk-scale encodings, not for compactness.
class BitString {
public:
    BitString() = default;

    static BitString from_string(const std::string& s) {
        BitString b;
        b.bits_.reserve(s.size());
        for (char c : s) {
            if (c == '0')
                b.bits_.push_back(0);
            else if (c == '1')
                b.bits_.push_back(1);
            else if (c == ' ' || c == '_')
                continue;  // grouping separators in fixtures
            else
                throw std::invalid_argument("BitString: bad character in bit literal");
        }
        return b;
    }

    std::string to_string() const {
        std::string s;
        s.reserve(bits_.size());
        for (uint8_t b : bits_) s.push_back(b ? '1' : '0');
        return s;
    }

    void push_back(bool bit) { bits_.push_back(bit ? 1 : 0); }
    void pop_back() { bits_.pop_back(); }
    void truncate(size_t n) { bits_.resize(n); }

    void append(const BitString& other) {
        bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
    }

    // n as MSB-first binary, exactly width bits (n must fit).
    void append_bits(uint64_t n, unsigned width) {
        for (unsigned i = width; i-- > 0;) bits_.push_back((n >> i) & 1u);
    }

    bool operator[](size_t i) const { return bits_[i] != 0; }
    size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }

    BitString prefix(size_t n) const {
        BitString b;
        b.bits_.assign(bits_.begin(), bits_.begin() + static_cast<long>(n));
        return b;
    }

    bool is_prefix_of(const BitString& other) const {
        if (size() > other.size()) return false;
        for (size_t i = 0; i < size(); ++i)
            if (bits_[i] != other.bits_[i]) return false;
        return true;
    }

    friend bool operator==(const BitString& a, const BitString& b) { return a.bits_ == b.bits_; }
    friend bool operator!=(const BitString& a, const BitString& b) { return !(a == b); }
    // Plain lexicographic order; a proper prefix sorts before its extensions.
    friend bool operator<(const BitString& a, const BitString& b) { return a.bits_ < b.bits_; }

private:
    std::vector<uint8_t> bits_;
};

// Cursor over a BitString for sequential decoding.
class BitReader {
public:
    explicit BitReader(const BitString& bits, size_t pos = 0) : bits_(&bits), pos_(pos) {}

    bool read_bit() {
        if (pos_ >= bits_->size()) throw std::out_of_range("BitReader: past end");
        return (*bits_)[pos_++];
    }

    uint64_t read_bits(unsigned width) {
        uint64_t v = 0;
        for (unsigned i = 0; i < width; ++i) v = (v << 1) | (read_bit() ? 1u : 0u);
        return v;
    }

    size_t position() const { return pos_; }
    size_t remaining() const { return bits_->size() - pos_; }
    bool exhausted() const { return pos_ >= bits_->size(); }

private:
    const BitString* bits_;
    size_t pos_;
};

}  // namespace mpstar
