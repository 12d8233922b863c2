#pragma once

#include <cassert>
#include <memory>
#include <vector>

#include "lazardlab/common.hpp"

namespace lazardlab {

// R/pi^N for R = Z_p (e = 1) or a totally ramified Eisenstein extension
// Z_p[pi]/(E(pi)) of degree e. All valuations are normalized by v(p) = 1 and
// measured internally in pi-units, so val_pi(x) = e * v(x).
struct RingSpec {
    int64_t p;
    int e;
    std::vector<int64_t> eis;  // monic, ascending; eis.size() == e + 1
    int N;                     // work modulo pi^N

    int m0;                          // ceil(N / e), p-digits of slot 0
    int64_t p_pow_m0;                // p^m0
    std::vector<int> digit_prec;     // slot s is a residue mod p^digit_prec[s]
    std::vector<int64_t> digit_mod;  //

    RingSpec(int64_t p_, int e_, std::vector<int64_t> eis_, int N_)
        : p(p_), e(e_), eis(std::move(eis_)), N(N_) {
        if (p < 2) throw DomainError("RingSpec: p must be >= 2");
        for (int64_t d = 2; d * d <= p; ++d)
            if (p % d == 0) throw DomainError("RingSpec: p not prime");
        if (e < 1) throw DomainError("RingSpec: e must be >= 1");
        if (N < 1) throw DomainError("RingSpec: precision must be >= 1");
        if (static_cast<int>(eis.size()) != e + 1 || eis[e] != 1)
            throw DomainError("RingSpec: polynomial must be monic of degree e");
        if (vp(eis[0], p) != 1) throw DomainError("RingSpec: constant term must have valuation 1");
        for (int i = 1; i < e; ++i)
            if (vp(eis[i], p) < 1) throw DomainError("RingSpec: middle coefficients need valuation >= 1");
        m0 = (N + e - 1) / e;
        p_pow_m0 = pow_i64(p, m0);
        digit_prec.resize(e);
        digit_mod.resize(e);
        for (int s = 0; s < e; ++s) {
            digit_prec[s] = N > s ? (N - s + e - 1) / e : 0;
            digit_mod[s] = pow_i64(p, digit_prec[s]);
        }
    }

    bool is_two() const { return p == 2; }
    // smallest integer > e/(p-1)
    int rho() const { return static_cast<int>(e / (p - 1)) + 1; }
    bool same_arithmetic(const RingSpec& o) const { return p == o.p && e == o.e && eis == o.eis; }
};

using Ring = std::shared_ptr<const RingSpec>;

inline Ring make_ring(int64_t p, int e, std::vector<int64_t> eis, int N) {
    return std::make_shared<const RingSpec>(p, e, std::move(eis), N);
}

inline Ring make_zp(int64_t p, int N) { return make_ring(p, 1, {-p, 1}, N); }

inline Ring with_precision(const Ring& r, int N2) { return make_ring(r->p, r->e, r->eis, N2); }

class PAdicScalar {
  public:
    PAdicScalar() = default;
    explicit PAdicScalar(Ring ring) : ring_(std::move(ring)), coeffs_(ring_->e, 0) {}
    PAdicScalar(Ring ring, int64_t n) : PAdicScalar(std::move(ring)) {
        coeffs_[0] = mod_reduce(n, ring_->digit_mod[0] ? ring_->digit_mod[0] : 1);
        canonicalize();
    }
    PAdicScalar(Ring ring, std::vector<int64_t> coeffs) : ring_(std::move(ring)), coeffs_(std::move(coeffs)) {
        if (static_cast<int>(coeffs_.size()) != ring_->e) throw DomainError("PAdicScalar: bad coefficient count");
        canonicalize();
    }

    const Ring& ring() const { return ring_; }
    const std::vector<int64_t>& coeffs() const { return coeffs_; }

    bool is_zero() const {
        for (int64_t c : coeffs_)
            if (c != 0) return false;
        return true;
    }

    // valuation in pi-units, in [0, N); N means "at least the precision" (zero at precision)
    int val_pi() const {
        int best = ring_->N;
        for (int s = 0; s < ring_->e; ++s) {
            if (coeffs_[s] == 0) continue;
            int v = ring_->e * vp(coeffs_[s], ring_->p) + s;
            if (v < best) best = v;
        }
        return best;
    }
    Rat omega() const { return Rat(val_pi(), ring_->e); }
    bool at_bottom() const { return val_pi() >= ring_->N; }

    friend PAdicScalar operator+(const PAdicScalar& a, const PAdicScalar& b) {
        a.check_compatible(b);
        PAdicScalar r(a.ring_);
        for (int s = 0; s < a.ring_->e; ++s) r.coeffs_[s] = a.coeffs_[s] + b.coeffs_[s];
        r.canonicalize();
        return r;
    }
    friend PAdicScalar operator-(const PAdicScalar& a, const PAdicScalar& b) {
        a.check_compatible(b);
        PAdicScalar r(a.ring_);
        for (int s = 0; s < a.ring_->e; ++s) r.coeffs_[s] = a.coeffs_[s] - b.coeffs_[s];
        r.canonicalize();
        return r;
    }
    PAdicScalar operator-() const {
        PAdicScalar r(ring_);
        for (int s = 0; s < ring_->e; ++s) r.coeffs_[s] = -coeffs_[s];
        r.canonicalize();
        return r;
    }
    friend PAdicScalar operator*(const PAdicScalar& a, const PAdicScalar& b) {
        a.check_compatible(b);
        const RingSpec& R = *a.ring_;
        std::vector<__int128> tmp(2 * R.e - 1, 0);
        for (int s = 0; s < R.e; ++s) {
            if (a.coeffs_[s] == 0) continue;
            for (int t = 0; t < R.e; ++t)
                tmp[s + t] += static_cast<__int128>(a.coeffs_[s]) * b.coeffs_[t];
        }
        // substitute pi^e = -(eis[0] + ... + eis[e-1] pi^{e-1}) from the top down
        for (int j = 2 * R.e - 2; j >= R.e; --j) {
            __int128 c = tmp[j] % R.p_pow_m0;
            tmp[j] = 0;
            if (c == 0) continue;
            for (int i = 0; i < R.e; ++i) tmp[j - R.e + i] -= c * R.eis[i];
        }
        PAdicScalar r(a.ring_);
        for (int s = 0; s < R.e; ++s)
            r.coeffs_[s] = static_cast<int64_t>(tmp[s] % R.p_pow_m0);
        r.canonicalize();
        return r;
    }
    PAdicScalar scaled(int64_t n) const {
        PAdicScalar r(ring_);
        for (int s = 0; s < ring_->e; ++s)
            r.coeffs_[s] = static_cast<int64_t>(static_cast<__int128>(coeffs_[s]) * n % ring_->p_pow_m0);
        r.canonicalize();
        return r;
    }

    friend bool operator==(const PAdicScalar& a, const PAdicScalar& b) {
        a.check_compatible(b);
        return a.coeffs_ == b.coeffs_;
    }
    friend bool operator!=(const PAdicScalar& a, const PAdicScalar& b) { return !(a == b); }

    PAdicScalar pi_shift(int t) const {  // multiply by pi^t, t >= 0
        PAdicScalar pi(ring_);
        if (ring_->e == 1) {
            pi.coeffs_[0] = mod_reduce(ring_->p, ring_->digit_mod[0]);
        } else {
            pi.coeffs_[1] = 1;
        }
        PAdicScalar r = *this;
        for (int i = 0; i < t; ++i) r = r * pi;
        return r;
    }

    // canonical pi-digit expansion, digits[j] in [0, p)
    std::vector<int64_t> pi_digits() const {
        std::vector<int64_t> d(ring_->N, 0);
        for (int s = 0; s < ring_->e; ++s) {
            int64_t c = coeffs_[s];
            for (int t = 0; t < ring_->digit_prec[s]; ++t) {
                int j = s + t * ring_->e;
                if (j < ring_->N) d[j] = c % ring_->p;
                c /= ring_->p;
            }
        }
        return d;
    }
    static PAdicScalar from_pi_digits(const Ring& ring, const std::vector<int64_t>& d) {
        std::vector<int64_t> coeffs(ring->e, 0);
        for (int j = static_cast<int>(d.size()) - 1; j >= 0; --j) {
            int s = j % ring->e;
            coeffs[s] = coeffs[s] * ring->p + d[j];
        }
        // digits above slot precision were zero by construction of pi_digits
        return PAdicScalar(ring, std::move(coeffs));
    }

    // exact division by pi^t; the result is only trustworthy modulo pi^{N-t}
    PAdicScalar div_exact_pi(int t) const {
        auto d = pi_digits();
        for (int j = 0; j < t && j < static_cast<int>(d.size()); ++j)
            if (d[j] != 0)
                throw PrecisionError("div_exact_pi: value not divisible by pi^" + std::to_string(t));
        std::vector<int64_t> out(ring_->N, 0);
        for (int j = t; j < ring_->N; ++j) out[j - t] = d[j];
        return from_pi_digits(ring_, out);
    }

    // exact division by the integer n != 0; result trustworthy modulo pi^{N - e*vp(n)}
    PAdicScalar div_exact_int(int64_t n) const {
        if (n == 0) throw DomainError("div_exact_int: zero divisor");
        bool neg = n < 0;
        if (neg) n = -n;
        int v = vp(n, ring_->p);
        int64_t u = n / pow_i64(ring_->p, v);
        PAdicScalar r(ring_);
        int64_t pv = pow_i64(ring_->p, v);
        for (int s = 0; s < ring_->e; ++s) {
            int64_t mv = std::min<int64_t>(pv, ring_->digit_mod[s]);
            if (mv > 1 && coeffs_[s] % mv != 0)
                throw PrecisionError("div_exact_int: not divisible by p^" + std::to_string(v) +
                                     " at requested precision");
            r.coeffs_[s] = coeffs_[s] / pv;
        }
        if (u != 1) r = r.scaled(inv_mod(u, ring_->p_pow_m0));
        if (neg) r = -r;
        r.canonicalize();
        return r;
    }

    // multiplicative inverse of a unit (val_pi == 0), by Newton iteration
    PAdicScalar unit_inverse() const {
        if (val_pi() != 0) throw DomainError("unit_inverse: not a unit");
        PAdicScalar b(ring_, inv_mod(mod_reduce(coeffs_[0], ring_->p), ring_->p));
        PAdicScalar two(ring_, 2);
        for (int prec = 1; prec < 2 * ring_->m0; prec *= 2) b = b * (two - *this * b);
        return b;
    }

    // canonical embedding/truncation into a ring with the same arithmetic
    PAdicScalar to_ring(const Ring& other) const {
        if (!ring_->same_arithmetic(*other)) throw DomainError("to_ring: incompatible rings");
        return PAdicScalar(other, coeffs_);
    }

    std::string str() const {
        std::string s;
        for (int i = 0; i < ring_->e; ++i) {
            if (i) s += " + ";
            s += std::to_string(coeffs_[i]);
            if (i) s += "*pi^" + std::to_string(i);
        }
        return s;
    }

  private:
    void canonicalize() {
        for (int s = 0; s < ring_->e; ++s) coeffs_[s] = mod_reduce(coeffs_[s], std::max<int64_t>(ring_->digit_mod[s], 1));
    }
    void check_compatible(const PAdicScalar& o) const {
        if (ring_.get() != o.ring_.get() && !(ring_->same_arithmetic(*o.ring_) && ring_->N == o.ring_->N))
            throw DomainError("PAdicScalar: mixed rings");
    }

    Ring ring_;
    std::vector<int64_t> coeffs_;
};

}  // namespace lazardlab
