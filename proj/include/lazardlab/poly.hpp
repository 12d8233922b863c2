#pragma once

#include <map>

#include "lazardlab/padic.hpp"

namespace lazardlab {

// sparse multivariate polynomial over R/pi^N, truncated at a total degree cap
class TruncPoly {
  public:
    using Exps = std::vector<int>;

    TruncPoly() = default;
    TruncPoly(Ring ring, int nvars, int degree_cap)
        : ring_(std::move(ring)), nvars_(nvars), cap_(degree_cap) {}

    static TruncPoly variable(const Ring& ring, int nvars, int degree_cap, int index) {
        TruncPoly p(ring, nvars, degree_cap);
        Exps e(nvars, 0);
        e[index] = 1;
        p.terms_[e] = PAdicScalar(ring, 1);
        return p;
    }
    static TruncPoly constant(const Ring& ring, int nvars, int degree_cap, PAdicScalar c) {
        TruncPoly p(ring, nvars, degree_cap);
        if (!c.is_zero()) p.terms_[Exps(nvars, 0)] = std::move(c);
        return p;
    }

    const Ring& ring() const { return ring_; }
    int nvars() const { return nvars_; }
    int degree_cap() const { return cap_; }
    const std::map<Exps, PAdicScalar>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // least total degree of a nonzero term; degree_cap + 1 when zero
    int order() const {
        int best = cap_ + 1;
        for (auto& [e, c] : terms_) best = std::min(best, total(e));
        return best;
    }

    void set_coeff(const Exps& e, PAdicScalar c) {
        if (total(e) > cap_) throw DomainError("TruncPoly: monomial beyond the degree cap");
        if (c.is_zero())
            terms_.erase(e);
        else
            terms_[e] = std::move(c);
    }
    PAdicScalar coeff(const Exps& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? PAdicScalar(ring_) : it->second;
    }

    friend TruncPoly operator+(const TruncPoly& a, const TruncPoly& b) {
        TruncPoly r = a;
        for (auto& [e, c] : b.terms_) r.accumulate(e, c);
        return r;
    }
    friend TruncPoly operator-(const TruncPoly& a, const TruncPoly& b) {
        TruncPoly r = a;
        for (auto& [e, c] : b.terms_) r.accumulate(e, -c);
        return r;
    }
    friend TruncPoly operator*(const TruncPoly& a, const TruncPoly& b) {
        TruncPoly r(a.ring_, a.nvars_, a.cap_);
        for (auto& [ea, ca] : a.terms_) {
            int da = total(ea);
            for (auto& [eb, cb] : b.terms_) {
                if (da + total(eb) > a.cap_) continue;
                Exps e(a.nvars_);
                for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
                r.accumulate(e, ca * cb);
            }
        }
        return r;
    }
    TruncPoly scaled(const PAdicScalar& c) const {
        TruncPoly r(ring_, nvars_, cap_);
        for (auto& [e, t] : terms_) r.accumulate(e, t * c);
        return r;
    }
    TruncPoly scaled(int64_t c) const {
        TruncPoly r(ring_, nvars_, cap_);
        for (auto& [e, t] : terms_) r.accumulate(e, t.scaled(c));
        return r;
    }
    TruncPoly div_exact_int(int64_t m) const {
        TruncPoly r(ring_, nvars_, cap_);
        for (auto& [e, t] : terms_) r.accumulate(e, t.div_exact_int(m));
        return r;
    }

    PAdicScalar eval(const std::vector<PAdicScalar>& point) const {
        PAdicScalar acc(ring_);
        for (auto& [e, c] : terms_) {
            PAdicScalar term = c;
            for (int i = 0; i < nvars_; ++i)
                for (int t = 0; t < e[i]; ++t) term = term * point[i];
            acc = acc + term;
        }
        return acc;
    }

    // substitute each variable by a polynomial in a common target variable set
    TruncPoly compose(const std::vector<TruncPoly>& subs) const {
        if (static_cast<int>(subs.size()) != nvars_) throw DomainError("TruncPoly: bad substitution arity");
        int tvars = subs.empty() ? 0 : subs[0].nvars_;
        TruncPoly acc(ring_, tvars, cap_);
        for (auto& [e, c] : terms_) {
            TruncPoly term = TruncPoly::constant(ring_, tvars, cap_, c);
            for (int i = 0; i < nvars_; ++i)
                for (int t = 0; t < e[i]; ++t) term = term * subs[i];
            acc = acc + term;
        }
        return acc;
    }

    TruncPoly to_ring(const Ring& other) const {
        TruncPoly r(other, nvars_, cap_);
        for (auto& [e, c] : terms_) r.accumulate(e, c.to_ring(other));
        return r;
    }

    friend bool operator==(const TruncPoly& a, const TruncPoly& b) { return a.terms_ == b.terms_; }

    static int total(const Exps& e) {
        int d = 0;
        for (int x : e) d += x;
        return d;
    }

  private:
    void accumulate(const Exps& e, const PAdicScalar& c) {
        if (total(e) > cap_ || c.is_zero()) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(e, c);
        } else {
            it->second = it->second + c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    Ring ring_;
    int nvars_ = 0;
    int cap_ = 0;
    std::map<Exps, PAdicScalar> terms_;
};

}  // namespace lazardlab
