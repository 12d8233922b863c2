#include "lazardlab/formal_groups.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace lazardlab {

namespace {

std::vector<PAdicScalar> random_point_coords(Rng& rng, const Ring& ring, int n, int min_val) {
    std::uniform_int_distribution<int64_t> digit(0, ring->p - 1);
    std::vector<PAdicScalar> out;
    for (int i = 0; i < n; ++i) {
        std::vector<int64_t> d(ring->N, 0);
        for (int t = min_val; t < ring->N; ++t) d[t] = digit(rng);
        out.push_back(PAdicScalar::from_pi_digits(ring, d));
    }
    return out;
}

std::vector<PAdicScalar> eval_law(const FormalGroupLaw& f, const std::vector<PAdicScalar>& x,
                                  const std::vector<PAdicScalar>& y) {
    std::vector<PAdicScalar> point;
    point.reserve(2 * f.n_vars);
    for (const auto& c : x) point.push_back(c);
    for (const auto& c : y) point.push_back(c);
    std::vector<PAdicScalar> out;
    for (int i = 0; i < f.n_vars; ++i) out.push_back(f.law[i].eval(point));
    return out;
}

// iterated F(X, f_{m-1}(X)): the p-power series in the n X-variables
std::vector<TruncPoly> p_power_series(const std::vector<TruncPoly>& law, const Ring& ring, int n,
                                      int cap, int64_t p) {
    std::vector<TruncPoly> cur, xs;
    for (int i = 0; i < n; ++i) cur.push_back(TruncPoly::variable(ring, n, cap, i));
    xs = cur;
    for (int64_t m = 1; m < p; ++m) {
        std::vector<TruncPoly> subs = xs;
        subs.insert(subs.end(), cur.begin(), cur.end());
        std::vector<TruncPoly> next;
        for (int i = 0; i < n; ++i) next.push_back(law[i].compose(subs));
        cur = std::move(next);
    }
    return cur;
}

}  // namespace

void FormalGroupLaw::validate(int samples, uint64_t seed) const {
    if (static_cast<int>(law.size()) != n_vars) throw DomainError("fgl: wrong number of series");
    const int n = n_vars;
    for (int i = 0; i < n; ++i) {
        if (law[i].nvars() != 2 * n) throw DomainError("fgl: series must have 2n variables");
        // F(X, 0) = X and F(0, Y) = Y, coefficient-exact up to the cap
        for (auto& [e, c] : law[i].terms()) {
            bool pure_x = true, pure_y = true;
            for (int v = 0; v < n; ++v)
                if (e[n + v] != 0) pure_x = false;
            for (int v = 0; v < n; ++v)
                if (e[v] != 0) pure_y = false;
            if (pure_x || pure_y) {
                bool is_linear_self = TruncPoly::total(e) == 1 && (e[i] == 1 || e[n + i] == 1);
                if (!is_linear_self)
                    throw DomainError("fgl: unit law fails (nonzero pure-block coefficient)");
            }
        }
        TruncPoly::Exps ex(2 * n, 0);
        ex[i] = 1;
        if (law[i].coeff(ex) != PAdicScalar(ring, 1)) throw DomainError("fgl: unit law fails on X");
        ex[i] = 0;
        ex[n + i] = 1;
        if (law[i].coeff(ex) != PAdicScalar(ring, 1)) throw DomainError("fgl: unit law fails on Y");
    }
    // associativity on sampled triples, exact at precision: direct triple products
    Rng rng(seed);
    for (int t = 0; t < samples; ++t) {
        auto x = random_point_coords(rng, ring, n, 1);
        auto y = random_point_coords(rng, ring, n, 1);
        auto z = random_point_coords(rng, ring, n, 1);
        auto left = eval_law(*this, eval_law(*this, x, y), z);
        auto right = eval_law(*this, x, eval_law(*this, y, z));
        for (int i = 0; i < n; ++i)
            if (left[i] != right[i]) throw DomainError("fgl: associativity fails at a sampled triple");
    }
}

FormalGroupLaw additive_law(const Ring& ring, int n_vars, int degree_cap) {
    FormalGroupLaw f{ring, n_vars, degree_cap, {}};
    for (int i = 0; i < n_vars; ++i) {
        TruncPoly s = TruncPoly::variable(ring, 2 * n_vars, degree_cap, i) +
                      TruncPoly::variable(ring, 2 * n_vars, degree_cap, n_vars + i);
        f.law.push_back(std::move(s));
    }
    return f;
}

FormalGroupLaw multiplicative_law(const Ring& ring, int degree_cap) {
    FormalGroupLaw f{ring, 1, degree_cap, {}};
    TruncPoly x = TruncPoly::variable(ring, 2, degree_cap, 0);
    TruncPoly y = TruncPoly::variable(ring, 2, degree_cap, 1);
    f.law.push_back(x + y + x * y);
    return f;
}

FormalGroupLaw unipotent2_law(const Ring& ring, int degree_cap) {
    FormalGroupLaw f{ring, 2, degree_cap, {}};
    TruncPoly a = TruncPoly::variable(ring, 4, degree_cap, 0);
    TruncPoly b = TruncPoly::variable(ring, 4, degree_cap, 1);
    TruncPoly a2 = TruncPoly::variable(ring, 4, degree_cap, 2);
    TruncPoly b2 = TruncPoly::variable(ring, 4, degree_cap, 3);
    f.law.push_back(a + a2);
    f.law.push_back(b + b2 + a * a2);
    return f;
}

FormalGroupLaw read_fgl(std::istream& is) {
    int64_t p;
    int e, n_vars, cap, N;
    if (!(is >> p >> e >> n_vars >> cap >> N)) throw DomainError("fgl file: bad header");
    std::vector<int64_t> eis(e + 1);
    for (int t = 0; t <= e; ++t)
        if (!(is >> eis[t])) throw DomainError("fgl file: truncated eisenstein polynomial");
    Ring ring = make_ring(p, e, eis, N);
    FormalGroupLaw f{ring, n_vars, cap, {}};
    for (int i = 0; i < n_vars; ++i) f.law.push_back(TruncPoly(ring, 2 * n_vars, cap));
    int var;
    while (is >> var) {
        TruncPoly::Exps exps(2 * n_vars);
        for (int t = 0; t < 2 * n_vars; ++t)
            if (!(is >> exps[t])) throw DomainError("fgl file: truncated exponent vector");
        std::vector<int64_t> coeffs(e);
        for (int t = 0; t < e; ++t)
            if (!(is >> coeffs[t])) throw DomainError("fgl file: truncated coefficient");
        f.law[var].set_coeff(exps, PAdicScalar(ring, coeffs));
    }
    f.validate();
    return f;
}

void write_fgl(std::ostream& os, const FormalGroupLaw& f) {
    const Ring& r = f.ring;
    os << r->p << " " << r->e << " " << f.n_vars << " " << f.degree_cap << " " << r->N << "\n";
    for (size_t i = 0; i < r->eis.size(); ++i) os << r->eis[i] << (i + 1 < r->eis.size() ? " " : "");
    os << "\n";
    for (int i = 0; i < f.n_vars; ++i)
        for (auto& [e, c] : f.law[i].terms()) {
            os << i;
            for (int x : e) os << " " << x;
            for (int64_t cc : c.coeffs()) os << " " << cc;
            os << "\n";
        }
}

std::vector<PAdicScalar> point_coords(const Elt& x) {
    std::vector<PAdicScalar> out;
    for (int i = 0; i < x.rows(); ++i) out.push_back(x.at(i, 0));
    return out;
}

Elt make_point(const Ring& ring, const std::vector<PAdicScalar>& coords) {
    Elt x(ring, static_cast<int>(coords.size()), 1);
    for (size_t i = 0; i < coords.size(); ++i) x.at(static_cast<int>(i), 0) = coords[i];
    return x;
}

Elt fgl_multiply(const FormalGroupLaw& f, const Elt& x, const Elt& y) {
    if (f.degree_cap < f.ring->N * f.ring->e)
        throw PrecisionError("fgl_multiply: truncation degree " + std::to_string(f.degree_cap) +
                             " too small for precision N = " + std::to_string(f.ring->N));
    return make_point(f.ring, eval_law(f, point_coords(x), point_coords(y)));
}

Elt fgl_inverse(const FormalGroupLaw& f, const Elt& x) {
    // fixed point of y -> y - F(x, y); contraction since F(x,y) = x + y + higher
    auto xc = point_coords(x);
    std::vector<PAdicScalar> y;
    for (auto& c : xc) y.push_back(-c);
    for (int it = 0; it < f.ring->N + 2; ++it) {
        auto fy = eval_law(f, xc, y);
        bool zero = true;
        for (int i = 0; i < f.n_vars; ++i) {
            y[i] = y[i] - fy[i];
            zero = zero && fy[i].is_zero();
        }
        if (zero) break;
    }
    auto check = eval_law(f, xc, y);
    for (auto& c : check)
        if (!c.is_zero()) throw DomainError("fgl_inverse: iteration failed to converge");
    return make_point(f.ring, y);
}

PPowerDecomposition p_power_decomposition(const FormalGroupLaw& f) {
    const int n = f.n_vars;
    const int64_t p = f.ring->p;
    if (f.degree_cap < p) throw DomainError("p_power_decomposition: degree cap below p");
    std::vector<TruncPoly> current = p_power_series(f.law, f.ring, n, f.degree_cap, p);
    PPowerDecomposition out;
    for (int i = 0; i < n; ++i) {
        TruncPoly phi(f.ring, n, f.degree_cap), psi(f.ring, n, f.degree_cap);
        for (auto& [e, c] : current[i].terms()) {
            int d = TruncPoly::total(e);
            if (d == 1) {
                // the linear part must be exactly p X_i
                if (e[i] != 1 || c != PAdicScalar(f.ring, p))
                    throw DomainError("p_power_decomposition: linear part is not p*X");
                continue;
            }
            if (d < p) {
                // low-degree coefficients must be divisible by p
                phi.set_coeff(e, c.div_exact_int(p));
            } else {
                psi.set_coeff(e, c);
            }
        }
        if (!phi.is_zero() && phi.order() < 2) throw DomainError("p_power_decomposition: ord(phi) < 2");
        if (!psi.is_zero() && psi.order() < p) throw DomainError("p_power_decomposition: ord(psi) < p");
        out.phi.push_back(std::move(phi));
        out.psi.push_back(std::move(psi));
    }
    return out;
}

namespace {

class FormalGroupPoints : public FilteredGroup {
  public:
    FormalGroupPoints(FormalGroupLaw f, int level_pi, bool allow_unsaturated)
        : f_(std::move(f)), level_(level_pi) {
        if (level_ < 1) throw DomainError("standard_group: level must be >= 1");
        if (!allow_unsaturated && !(static_cast<int64_t>(level_) * (f_.ring->p - 1) > f_.ring->e))
            throw DomainError("standard_group: level " + std::to_string(level_) +
                              " is below rho; take the saturation subgroup instead");
        if (f_.degree_cap < f_.ring->N * f_.ring->e)
            throw PrecisionError("standard_group: truncation degree too small for the precision");
        // surfaces a malformed law early, and pins ord(phi) >= 2, ord(psi) >= p
        p_power_decomposition(f_);
    }

    const Ring& ring() const override { return f_.ring; }
    Elt identity() const override { return Elt(f_.ring, f_.n_vars, 1); }
    Elt mul(const Elt& a, const Elt& b) const override { return fgl_multiply(f_, a, b); }
    Elt inv(const Elt& a) const override { return fgl_inverse(f_, a); }

    std::optional<Rat> omega(const Elt& a) const override {
        int v = a.omega_pi();
        if (v >= f_.ring->N) return std::nullopt;
        return Rat(v, f_.ring->e);
    }

    bool contains(const Elt& a) const override {
        return a.rows() == f_.n_vars && a.cols() == 1 && a.omega_pi() >= level_;
    }

    Elt random_element(Rng& rng) const override {
        return make_point(f_.ring, random_point_coords(rng, f_.ring, f_.n_vars, level_));
    }
    Elt random_element_deep(Rng& rng, Rat nu) const override {
        Rat scaled = nu * Rat(f_.ring->e, 1);
        int lv = scaled.num <= 0 ? 0 : static_cast<int>((scaled.num + scaled.den - 1) / scaled.den);
        return make_point(f_.ring,
                          random_point_coords(rng, f_.ring, f_.n_vars, std::max(level_, lv)));
    }

    OrderedBasis ordered_basis() const override {
        OrderedBasis b;
        const Ring& r = f_.ring;
        for (int s = 0; s < r->e; ++s)
            for (int i = 0; i < f_.n_vars; ++i) {
                if (level_ + s >= r->N) continue;
                std::vector<PAdicScalar> coords(f_.n_vars, PAdicScalar(r));
                coords[i] = PAdicScalar(r, 1).pi_shift(level_ + s);
                b.elements.push_back(make_point(r, coords));
                b.valuations.push_back(Rat(level_ + s, r->e));
            }
        b.equi_p_valued = r->e == 1;
        return b;
    }

    std::vector<Elt> filtration_generators(Rat nu) const override {
        Rat scaled = nu * Rat(f_.ring->e, 1);
        int lv = scaled.num <= 0 ? 0 : static_cast<int>((scaled.num + scaled.den - 1) / scaled.den);
        lv = std::max(level_, lv);
        std::vector<Elt> out;
        const Ring& r = f_.ring;
        for (int s = 0; s < r->e; ++s)
            for (int i = 0; i < f_.n_vars; ++i) {
                if (lv + s >= r->N) continue;
                std::vector<PAdicScalar> coords(f_.n_vars, PAdicScalar(r));
                coords[i] = PAdicScalar(r, 1).pi_shift(lv + s);
                out.push_back(make_point(r, coords));
            }
        return out;
    }

    std::vector<int64_t> key(const Elt& a, Rat level) const override {
        Rat scaled = level * Rat(f_.ring->e, 1);
        int digits = scaled.num <= 0 ? 0 : static_cast<int>((scaled.num + scaled.den - 1) / scaled.den);
        return a.key_mod(std::min(digits, f_.ring->N));
    }

    std::optional<Elt> p_th_root(const Elt& x) const override {
        auto ox = omega(x);
        if (!ox || !(*ox > Rat(1, 1) + Rat(1, f_.ring->p - 1))) return std::nullopt;
        return solve_p_power(x);
    }

    Rat omega_min() const override { return Rat(level_, f_.ring->e); }
    std::string describe() const override {
        return "standard group on m^" + std::to_string(f_.n_vars) + " at level pi^" +
               std::to_string(level_) + " (p=" + std::to_string(f_.ring->p) +
               ", e=" + std::to_string(f_.ring->e) + ")";
    }

  private:
    // solve f_p(y) = x by the contraction y <- y - (f_p(y) - x)/p at padded
    // precision; each step divides by p once and gains at least one pi-digit
    std::optional<Elt> solve_p_power(const Elt& x) const {
        const Ring& base = f_.ring;
        const int pad = base->e * (base->N + 2);
        Ring work = with_precision(base, base->N + pad);
        std::vector<TruncPoly> law_w;
        for (const TruncPoly& s : f_.law) {
            TruncPoly t(work, 2 * f_.n_vars, f_.degree_cap + pad);
            for (auto& [e, c] : s.terms()) t.set_coeff(e, c.to_ring(work));
            law_w.push_back(std::move(t));
        }
        std::vector<TruncPoly> fp =
            p_power_series(law_w, work, f_.n_vars, f_.degree_cap + pad, base->p);
        std::vector<PAdicScalar> target;
        for (const auto& c : point_coords(x)) target.push_back(c.to_ring(work));
        std::vector<PAdicScalar> y;
        for (const auto& c : target) y.push_back(c.div_exact_int(base->p));
        for (int it = 0; it <= base->N + pad; ++it) {
            bool zero = true;
            std::vector<PAdicScalar> err;
            for (int i = 0; i < f_.n_vars; ++i) {
                PAdicScalar v = fp[i].eval(y) - target[i];
                zero = zero && v.is_zero();
                err.push_back(std::move(v));
            }
            if (zero) break;
            for (int i = 0; i < f_.n_vars; ++i) y[i] = y[i] - err[i].div_exact_int(base->p);
        }
        std::vector<PAdicScalar> out;
        for (auto& c : y) out.push_back(c.to_ring(base));
        Elt root = make_point(base, out);
        Elt diff = pow(root, base->p) - x;
        if (!diff.is_zero() && diff.omega_pi() < base->N - base->e) return std::nullopt;
        return root;
    }

    FormalGroupLaw f_;
    int level_;
};

}  // namespace

GroupPtr standard_group(const FormalGroupLaw& f, int level_pi, bool allow_unsaturated) {
    return std::make_shared<FormalGroupPoints>(f, level_pi, allow_unsaturated);
}

GroupPtr saturation_subgroup(const FormalGroupLaw& f) {
    return standard_group(f, f.ring->rho(), false);
}

}  // namespace lazardlab
