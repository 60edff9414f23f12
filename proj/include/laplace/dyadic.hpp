#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace laplace::svc {

using int128 = __int128;

inline void dy_check(bool ok, const char* what) {
    if (!ok) throw std::logic_error(std::string("dyadic arithmetic: ") + what);
}

// Exact dyadic rational num / 2^exp2. Every endpoint quantity in the
// fat-Cantor construction is dyadic with exponent <= 2*depth + 1 and value in
// [0, 1]; the depth cap keeps all intermediates inside 128 bits. Doubles embed
// exactly, so point queries can be answered without rounding.
class Dyadic {
public:
    Dyadic() = default;
    Dyadic(long long n) : num_(n) { normalize(); }
    Dyadic(int128 num, int exp2) : num_(num), exp2_(exp2) { normalize(); }

    static Dyadic one_over_pow2(int k) { return Dyadic(1, k); }

    static Dyadic from_double(double x) {
        dy_check(std::isfinite(x), "from_double of non-finite");
        if (x == 0.0) return Dyadic();
        int e = 0;
        double m = std::frexp(x, &e); // x = m * 2^e, |m| in [0.5, 1)
        auto mant = static_cast<long long>(std::ldexp(m, 53)); // exact
        int k = 53 - e;
        if (k < 0) {
            dy_check(-k < 60, "from_double exponent too large");
            return Dyadic(static_cast<int128>(mant) << (-k), 0);
        }
        return Dyadic(static_cast<int128>(mant), k);
    }

    int128 num() const { return num_; }
    int exp2() const { return exp2_; }
    bool is_zero() const { return num_ == 0; }
    int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

    double to_double() const {
        return std::ldexp(static_cast<double>(num_), -exp2_);
    }

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
        int k = std::max(a.exp2_, b.exp2_);
        return Dyadic(shifted(a.num_, k - a.exp2_) + shifted(b.num_, k - b.exp2_), k);
    }
    friend Dyadic operator-(const Dyadic& a, const Dyadic& b) {
        int k = std::max(a.exp2_, b.exp2_);
        return Dyadic(shifted(a.num_, k - a.exp2_) - shifted(b.num_, k - b.exp2_), k);
    }
    friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
        dy_check(bit_length(a.num_) + bit_length(b.num_) <= 126, "mul overflow");
        return Dyadic(a.num_ * b.num_, a.exp2_ + b.exp2_);
    }
    Dyadic half() const { return Dyadic(num_, exp2_ + 1); }

    // Three-way compare with a magnitude shortcut, so operands of wildly
    // different scale never need a wide alignment shift.
    static int cmp(const Dyadic& a, const Dyadic& b) {
        int sa = a.sign(), sb = b.sign();
        if (sa != sb) return sa < sb ? -1 : 1;
        if (sa == 0) return 0;
        int la = bit_length(mag(a.num_)) - a.exp2_;
        int lb = bit_length(mag(b.num_)) - b.exp2_;
        if (la >= lb + 2) return sa;  // |a| >= 2^(la-1) >= 2^(lb+1) > |b|
        if (lb >= la + 2) return -sa;
        int k = std::max(a.exp2_, b.exp2_);
        int128 na = shifted(a.num_, k - a.exp2_);
        int128 nb = shifted(b.num_, k - b.exp2_);
        return na < nb ? -1 : (na > nb ? 1 : 0);
    }
    friend bool operator<(const Dyadic& a, const Dyadic& b) { return cmp(a, b) < 0; }
    friend bool operator>(const Dyadic& a, const Dyadic& b) { return cmp(a, b) > 0; }
    friend bool operator<=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) <= 0; }
    friend bool operator>=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) >= 0; }
    friend bool operator==(const Dyadic& a, const Dyadic& b) { return cmp(a, b) == 0; }
    friend bool operator!=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) != 0; }

    // "p/q" with q a power of two printed in decimal; plain "p" for integers.
    std::string to_fraction_string() const {
        if (exp2_ == 0) return decimal(num_);
        dy_check(exp2_ <= 126, "fraction exponent too large");
        return decimal(num_) + "/" + decimal(static_cast<int128>(1) << exp2_);
    }

    static int bit_length(int128 v) {
        if (v < 0) v = -v;
        auto hi = static_cast<std::uint64_t>(static_cast<unsigned __int128>(v) >> 64);
        auto lo = static_cast<std::uint64_t>(static_cast<unsigned __int128>(v));
        if (hi != 0) return 128 - __builtin_clzll(hi);
        if (lo != 0) return 64 - __builtin_clzll(lo);
        return 0;
    }

private:
    static int128 mag(int128 v) { return v < 0 ? -v : v; }

    static int128 shifted(int128 n, int sh) {
        dy_check(sh >= 0 && bit_length(n) + sh <= 126, "alignment overflow");
        return n << sh;
    }

    static std::string decimal(int128 v) {
        if (v == 0) return "0";
        bool neg = v < 0;
        unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v)
                                  : static_cast<unsigned __int128>(v);
        std::string s;
        while (u != 0) {
            s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
            u /= 10;
        }
        if (neg) s.push_back('-');
        return std::string(s.rbegin(), s.rend());
    }

    void normalize() {
        if (num_ == 0) {
            exp2_ = 0;
            return;
        }
        while ((num_ & 1) == 0 && exp2_ > 0) {
            num_ >>= 1;
            --exp2_;
        }
    }

    int128 num_ = 0;
    int exp2_ = 0;
};

} // namespace laplace::svc
