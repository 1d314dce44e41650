#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace mpstar {

// Big natural, used for the bound constants d_p, c_p and their products.
using BigNat = mpz_class;

inline BigNat pow2(uint64_t e) {
    BigNat v;
    mpz_ui_pow_ui(v.get_mpz_t(), 2, static_cast<unsigned long>(e));
    return v;
}

// Exact dyadic rational num / 2^exp2. Signed numerator: scheduler credits
// go negative after an execution is paid for. No floating point anywhere.
class Dyadic {
public:
    Dyadic() : num_(0), exp2_(0) {}
    Dyadic(long v) : num_(v), exp2_(0) {}  // NOLINT(google-explicit-constructor)

    static Dyadic pow2_neg(uint64_t e) {
        Dyadic d;
        d.num_ = 1;
        d.exp2_ = e;
        return d;
    }

    static Dyadic one() { return Dyadic(1); }
    static Dyadic zero() { return Dyadic(); }

    static Dyadic from_uint(uint64_t v) {
        Dyadic d;
        d.num_ = BigNat(static_cast<unsigned long>(v));
        return d;
    }

    Dyadic& operator+=(const Dyadic& o) {
        align_to(std::max(exp2_, o.exp2_));
        num_ += shifted(o.num_, exp2_ - o.exp2_);
        return *this;
    }

    Dyadic& operator-=(const Dyadic& o) {
        align_to(std::max(exp2_, o.exp2_));
        num_ -= shifted(o.num_, exp2_ - o.exp2_);
        return *this;
    }

    friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }
    friend Dyadic operator-(Dyadic a, const Dyadic& b) { return a -= b; }

    friend Dyadic operator*(Dyadic a, uint64_t k) {
        a.num_ *= static_cast<unsigned long>(k);
        return a;
    }

    int sign() const { return mpz_sgn(num_.get_mpz_t()); }

    // Three-way compare, exact.
    int compare(const Dyadic& o) const {
        const uint64_t e = std::max(exp2_, o.exp2_);
        const BigNat a = shifted(num_, e - exp2_);
        const BigNat b = shifted(o.num_, e - o.exp2_);
        return mpz_cmp(a.get_mpz_t(), b.get_mpz_t());
    }

    friend bool operator<(const Dyadic& a, const Dyadic& b) { return a.compare(b) < 0; }
    friend bool operator>(const Dyadic& a, const Dyadic& b) { return a.compare(b) > 0; }
    friend bool operator<=(const Dyadic& a, const Dyadic& b) { return a.compare(b) <= 0; }
    friend bool operator>=(const Dyadic& a, const Dyadic& b) { return a.compare(b) >= 0; }
    friend bool operator==(const Dyadic& a, const Dyadic& b) { return a.compare(b) == 0; }
    friend bool operator!=(const Dyadic& a, const Dyadic& b) { return a.compare(b) != 0; }

    const BigNat& numerator() const { return num_; }
    uint64_t exponent() const { return exp2_; }

    // "m/2^e" with the numerator in decimal; exact, no rounding.
    std::string to_string() const {
        if (exp2_ == 0) return num_.get_str();
        return num_.get_str() + "/2^" + std::to_string(exp2_);
    }

private:
    static BigNat shifted(const BigNat& v, uint64_t by) {
        if (by == 0) return v;
        BigNat r;
        mpz_mul_2exp(r.get_mpz_t(), v.get_mpz_t(), static_cast<mp_bitcnt_t>(by));
        return r;
    }

    void align_to(uint64_t e) {
        if (e == exp2_) return;
        num_ = shifted(num_, e - exp2_);
        exp2_ = e;
    }

    BigNat num_;
    uint64_t exp2_;
};

}  // namespace mpstar
