#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pslab {

// Signed 256-bit integer: sign + four 64-bit limbs, little endian.
// Arithmetic throws std::overflow_error past 256 bits instead of wrapping.
// Covers the exact coefficients this project needs (the worst Kepler
// coefficient numerator at order 30 is ~2^132).
class Int256 {
public:
    static constexpr int limbs = 4;

    Int256() = default;
    Int256(long long v) {
        if (v < 0) {
            neg_ = true;
            w_[0] = static_cast<std::uint64_t>(-(v + 1)) + 1;  // avoids overflow at LLONG_MIN
        } else {
            w_[0] = static_cast<std::uint64_t>(v);
        }
    }
    Int256(unsigned long long v) { w_[0] = v; }
    Int256(int v) : Int256(static_cast<long long>(v)) {}

    bool is_zero() const { return (w_[0] | w_[1] | w_[2] | w_[3]) == 0; }
    bool negative() const { return neg_ && !is_zero(); }
    int sign() const { return is_zero() ? 0 : (neg_ ? -1 : 1); }

    friend bool operator==(const Int256& a, const Int256& b) {
        if (a.is_zero() && b.is_zero()) return true;
        return a.neg_ == b.neg_ && a.w_ == b.w_;
    }
    friend bool operator!=(const Int256& a, const Int256& b) { return !(a == b); }

    friend bool operator<(const Int256& a, const Int256& b) {
        const int sa = a.sign(), sb = b.sign();
        if (sa != sb) return sa < sb;
        if (sa == 0) return false;
        const int c = cmp_mag(a, b);
        return sa > 0 ? c < 0 : c > 0;
    }
    friend bool operator>(const Int256& a, const Int256& b) { return b < a; }
    friend bool operator<=(const Int256& a, const Int256& b) { return !(b < a); }
    friend bool operator>=(const Int256& a, const Int256& b) { return !(a < b); }

    friend Int256 operator-(Int256 a) {
        a.neg_ = !a.negative();
        if (a.is_zero()) a.neg_ = false;
        return a;
    }

    friend Int256 operator+(const Int256& a, const Int256& b) {
        if (a.neg_ == b.neg_) {
            Int256 r = add_mag(a, b);
            r.neg_ = a.neg_;
            r.fix_zero();
            return r;
        }
        const int c = cmp_mag(a, b);
        if (c == 0) return Int256();
        Int256 r = c > 0 ? sub_mag(a, b) : sub_mag(b, a);
        r.neg_ = c > 0 ? a.neg_ : b.neg_;
        r.fix_zero();
        return r;
    }
    friend Int256 operator-(const Int256& a, const Int256& b) { return a + (-b); }

    friend Int256 operator*(const Int256& a, const Int256& b) {
        std::array<std::uint64_t, 8> acc{};
        for (int i = 0; i < limbs; ++i) {
            if (a.w_[static_cast<std::size_t>(i)] == 0) continue;
            std::uint64_t carry = 0;
            for (int j = 0; j < limbs; ++j) {
                const unsigned __int128 cur =
                    static_cast<unsigned __int128>(a.w_[static_cast<std::size_t>(i)]) * b.w_[static_cast<std::size_t>(j)] +
                    acc[static_cast<std::size_t>(i + j)] + carry;
                acc[static_cast<std::size_t>(i + j)] = static_cast<std::uint64_t>(cur);
                carry = static_cast<std::uint64_t>(cur >> 64);
            }
            acc[static_cast<std::size_t>(i + limbs)] += carry;
        }
        if (acc[4] | acc[5] | acc[6] | acc[7]) throw std::overflow_error("Int256: multiply overflow");
        Int256 r;
        for (int i = 0; i < limbs; ++i) r.w_[static_cast<std::size_t>(i)] = acc[static_cast<std::size_t>(i)];
        r.neg_ = a.negative() != b.negative();
        r.fix_zero();
        return r;
    }

    // Truncated division (C semantics: quotient rounds toward zero).
    friend Int256 operator/(const Int256& a, const Int256& b) { return divmod(a, b).first; }
    friend Int256 operator%(const Int256& a, const Int256& b) { return divmod(a, b).second; }

    static std::pair<Int256, Int256> divmod(const Int256& a, const Int256& b) {
        if (b.is_zero()) throw std::domain_error("Int256: division by zero");
        Int256 q, r;
        divmod_mag(a, b, q, r);
        q.neg_ = a.negative() != b.negative();
        r.neg_ = a.negative();
        q.fix_zero();
        r.fix_zero();
        return {q, r};
    }

    static Int256 gcd(Int256 a, Int256 b) {
        a.neg_ = false;
        b.neg_ = false;
        while (!b.is_zero()) {
            Int256 q, r;
            divmod_mag(a, b, q, r);
            a = b;
            b = r;
        }
        return a;
    }

    double to_double() const {
        double v = 0.0;
        for (int i = limbs - 1; i >= 0; --i) v = v * 18446744073709551616.0 + static_cast<double>(w_[static_cast<std::size_t>(i)]);
        return negative() ? -v : v;
    }

    long long to_int64() const {
        if (w_[1] | w_[2] | w_[3] || w_[0] > static_cast<std::uint64_t>(INT64_MAX))
            throw std::overflow_error("Int256: does not fit in 64 bits");
        const long long v = static_cast<long long>(w_[0]);
        return negative() ? -v : v;
    }

    std::string str() const {
        if (is_zero()) return "0";
        Int256 cur = *this;
        cur.neg_ = false;
        std::vector<std::uint64_t> chunks;
        const Int256 chunk(1000000000LL);
        while (!cur.is_zero()) {
            Int256 q, r;
            divmod_mag(cur, chunk, q, r);
            chunks.push_back(r.w_[0]);
            cur = q;
        }
        std::string out = negative() ? "-" : "";
        out += std::to_string(chunks.back());
        for (std::size_t i = chunks.size() - 1; i-- > 0;) {
            std::string part = std::to_string(chunks[i]);
            out += std::string(9 - part.size(), '0') + part;
        }
        return out;
    }

    static Int256 from_string(std::string_view s) {
        if (s.empty()) throw std::invalid_argument("Int256: empty integer");
        bool neg = false;
        std::size_t i = 0;
        if (s[0] == '+' || s[0] == '-') {
            neg = s[0] == '-';
            i = 1;
        }
        if (i == s.size()) throw std::invalid_argument("Int256: bad integer");
        Int256 v;
        const Int256 ten(10LL);
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("Int256: bad digit");
            v = v * ten + Int256(static_cast<long long>(s[i] - '0'));
        }
        v.neg_ = neg;
        v.fix_zero();
        return v;
    }

private:
    static std::uint64_t pow10(int i) {
        std::uint64_t p = 1;
        for (int j = 0; j < i; ++j) p *= 10;
        return p;
    }

    void fix_zero() {
        if (is_zero()) neg_ = false;
    }

    static int cmp_mag(const Int256& a, const Int256& b) {
        for (int i = limbs - 1; i >= 0; --i) {
            if (a.w_[static_cast<std::size_t>(i)] != b.w_[static_cast<std::size_t>(i)])
                return a.w_[static_cast<std::size_t>(i)] < b.w_[static_cast<std::size_t>(i)] ? -1 : 1;
        }
        return 0;
    }

    static Int256 add_mag(const Int256& a, const Int256& b) {
        Int256 r;
        unsigned __int128 carry = 0;
        for (int i = 0; i < limbs; ++i) {
            const unsigned __int128 cur = static_cast<unsigned __int128>(a.w_[static_cast<std::size_t>(i)]) +
                                          b.w_[static_cast<std::size_t>(i)] + carry;
            r.w_[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(cur);
            carry = cur >> 64;
        }
        if (carry) throw std::overflow_error("Int256: add overflow");
        return r;
    }

    // requires |a| >= |b|
    static Int256 sub_mag(const Int256& a, const Int256& b) {
        Int256 r;
        std::uint64_t borrow = 0;
        for (int i = 0; i < limbs; ++i) {
            const std::uint64_t ai = a.w_[static_cast<std::size_t>(i)];
            const std::uint64_t bi = b.w_[static_cast<std::size_t>(i)];
            const std::uint64_t t = ai - bi - borrow;
            borrow = (ai < bi + borrow || (bi + borrow < bi)) ? 1 : 0;
            r.w_[static_cast<std::size_t>(i)] = t;
        }
        return r;
    }

    static int top_limb(const std::array<std::uint64_t, 6>& w) {
        for (int i = 5; i >= 0; --i)
            if (w[static_cast<std::size_t>(i)] != 0) return i;
        return -1;
    }

    // Magnitude division, Knuth algorithm D in base 2^64.
    static void divmod_mag(const Int256& a, const Int256& b, Int256& q, Int256& r) {
        q = Int256();
        r = Int256();
        int nb = -1;
        for (int i = limbs - 1; i >= 0; --i)
            if (b.w_[static_cast<std::size_t>(i)] != 0) {
                nb = i + 1;
                break;
            }
        if (nb < 0) throw std::domain_error("Int256: division by zero");
        if (cmp_mag(a, b) < 0) {
            r = a;
            r.neg_ = false;
            return;
        }
        if (nb == 1) {
            // single-limb divisor
            const std::uint64_t d = b.w_[0];
            unsigned __int128 rem = 0;
            for (int i = limbs - 1; i >= 0; --i) {
                const unsigned __int128 cur = (rem << 64) | a.w_[static_cast<std::size_t>(i)];
                q.w_[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(cur / d);
                rem = cur % d;
            }
            r.w_[0] = static_cast<std::uint64_t>(rem);
            return;
        }

        const int shift = __builtin_clzll(b.w_[static_cast<std::size_t>(nb - 1)]);
        std::array<std::uint64_t, 6> u{};  // normalized dividend + appended zero limb
        std::array<std::uint64_t, 4> v{};
        for (int i = 0; i < limbs; ++i) u[static_cast<std::size_t>(i)] = a.w_[static_cast<std::size_t>(i)];
        if (shift) {
            u[4] = u[3] >> (64 - shift);
            for (int i = limbs - 1; i >= 1; --i)
                u[static_cast<std::size_t>(i)] = (u[static_cast<std::size_t>(i)] << shift) |
                                                 (u[static_cast<std::size_t>(i - 1)] >> (64 - shift));
            u[0] <<= shift;
            for (int i = nb - 1; i >= 1; --i)
                v[static_cast<std::size_t>(i)] = (b.w_[static_cast<std::size_t>(i)] << shift) |
                                                 (b.w_[static_cast<std::size_t>(i - 1)] >> (64 - shift));
            v[0] = b.w_[0] << shift;
        } else {
            for (int i = 0; i < nb; ++i) v[static_cast<std::size_t>(i)] = b.w_[static_cast<std::size_t>(i)];
        }

        int na = top_limb(u) + 1;
        if (na < nb) na = nb;
        const int m = na - nb;
        for (int j = m; j >= 0; --j) {
            const unsigned __int128 top =
                (static_cast<unsigned __int128>(u[static_cast<std::size_t>(j + nb)]) << 64) | u[static_cast<std::size_t>(j + nb - 1)];
            unsigned __int128 qhat = top / v[static_cast<std::size_t>(nb - 1)];
            unsigned __int128 rhat = top % v[static_cast<std::size_t>(nb - 1)];
            const unsigned __int128 b64 = (static_cast<unsigned __int128>(1) << 64);
            if (qhat >= b64) {
                qhat = b64 - 1;
                rhat = top - qhat * v[static_cast<std::size_t>(nb - 1)];
            }
            while (rhat < b64 &&
                   qhat * v[static_cast<std::size_t>(nb - 2)] >
                       ((rhat << 64) | u[static_cast<std::size_t>(j + nb - 2)])) {
                --qhat;
                rhat += v[static_cast<std::size_t>(nb - 1)];
            }
            // multiply-subtract qhat * v from u[j .. j+nb]
            unsigned __int128 borrow = 0, carry = 0;
            for (int i = 0; i < nb; ++i) {
                const unsigned __int128 prod = qhat * v[static_cast<std::size_t>(i)] + carry;
                carry = prod >> 64;
                const std::uint64_t plo = static_cast<std::uint64_t>(prod);
                const std::uint64_t ui = u[static_cast<std::size_t>(j + i)];
                const std::uint64_t t = ui - plo - static_cast<std::uint64_t>(borrow);
                borrow = (ui < plo + borrow || (plo + static_cast<std::uint64_t>(borrow)) < plo) ? 1 : 0;
                u[static_cast<std::size_t>(j + i)] = t;
            }
            const std::uint64_t utop = u[static_cast<std::size_t>(j + nb)];
            const unsigned __int128 sub = carry + borrow;  // can be exactly 2^64
            u[static_cast<std::size_t>(j + nb)] = utop - static_cast<std::uint64_t>(sub);
            std::uint64_t qj = static_cast<std::uint64_t>(qhat);
            if (static_cast<unsigned __int128>(utop) < sub) {
                // add back
                --qj;
                unsigned __int128 c2 = 0;
                for (int i = 0; i < nb; ++i) {
                    const unsigned __int128 cur = static_cast<unsigned __int128>(u[static_cast<std::size_t>(j + i)]) +
                                                  v[static_cast<std::size_t>(i)] + c2;
                    u[static_cast<std::size_t>(j + i)] = static_cast<std::uint64_t>(cur);
                    c2 = cur >> 64;
                }
                u[static_cast<std::size_t>(j + nb)] += static_cast<std::uint64_t>(c2);
            }
            if (j < limbs) q.w_[static_cast<std::size_t>(j)] = qj;
        }
        // denormalize remainder
        if (shift) {
            for (int i = 0; i < nb - 1; ++i)
                r.w_[static_cast<std::size_t>(i)] = (u[static_cast<std::size_t>(i)] >> shift) |
                                                    (u[static_cast<std::size_t>(i + 1)] << (64 - shift));
            r.w_[static_cast<std::size_t>(nb - 1)] = u[static_cast<std::size_t>(nb - 1)] >> shift;
        } else {
            for (int i = 0; i < nb; ++i) r.w_[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(i)];
        }
    }

    std::array<std::uint64_t, 4> w_{};
    bool neg_ = false;
};

} // namespace pslab
