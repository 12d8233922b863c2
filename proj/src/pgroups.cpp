#include "lazardlab/pgroups.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>

namespace lazardlab {

namespace {

// zero the digits at or above `digits`, keeping a canonical representative
Elt truncate_digits(const Elt& a, int digits) {
    const Ring& ring = a.ring();
    Elt out(ring, a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            auto d = a.at(i, j).pi_digits();
            for (int t = digits; t < ring->N; ++t) d[t] = 0;
            out.at(i, j) = PAdicScalar::from_pi_digits(ring, d);
        }
    return out;
}

class MatrixCongruenceGroup : public FilteredGroup,
                              public std::enable_shared_from_this<MatrixCongruenceGroup> {
  public:
    explicit MatrixCongruenceGroup(const MatrixGroupSpec& spec)
        : spec_(spec),
          ring_(make_ring(spec.p, spec.e,
                          spec.eisenstein_poly.empty() ? std::vector<int64_t>{-spec.p, 1}
                                                       : spec.eisenstein_poly,
                          spec.precision_N)) {
        if (spec.n < 1) throw DomainError("build_group: n must be >= 1");
        if (spec.shape == Shape::UnipotentUpper && spec.n < 2)
            throw DomainError("build_group: unipotent shape needs n >= 2");
        // level >= rho keeps the group inside the log-convergence domain:
        // omega > 1/(p-1) on all of G
        Rat minimal = omega_min();
        if (!(minimal * Rat(spec_.p - 1, 1) > Rat(1, 1))) {
            // below rho the filtration is not a p-valuation; such groups are
            // admitted for diagnostics only. For p = 2 the one-unit lattice can
            // even fail to generate (1 + 2 Z_2 has the torsion -1), so only the
            // scalar diagnostic case is supported there.
            bool ok = spec.allow_unsaturated &&
                      (spec.p != 2 || (spec.e == 1 && spec.n == 1 && spec.level == 1 &&
                                       spec.filtration == FiltrationKind::PiAdic));
            if (!ok)
                throw DomainError("build_group: level " + std::to_string(spec.level) +
                                  " is below rho = " + std::to_string(ring_->rho()) +
                                  "; the filtration is not a p-valuation there");
        }
    }

    const Ring& ring() const override { return ring_; }

    int omega_den() const override {
        return spec_.filtration == FiltrationKind::Weil ? 1 : ring_->e;
    }

    Elt identity() const override { return PAdicMatrix::identity(ring_, spec_.n); }

    Elt mul(const Elt& a, const Elt& b) const override { return a * b; }

    Elt inv(const Elt& a) const override { return one_unit_inverse(a); }

    std::optional<Rat> omega(const Elt& a) const override {
        Elt x = a - identity();
        if (spec_.filtration == FiltrationKind::PiAdic) {
            int v = x.omega_pi();
            if (v >= ring_->N) return std::nullopt;
            return Rat(v, ring_->e);
        }
        // Weil filtration: min p-valuation over the Z_p-coordinates of X, i.e.
        // over the pi-power slots of every entry
        int best = INT32_MAX;
        for (int i = 0; i < spec_.n; ++i)
            for (int j = 0; j < spec_.n; ++j) {
                const auto& c = x.at(i, j).coeffs();
                for (int s = 0; s < ring_->e; ++s)
                    if (c[s] != 0) best = std::min(best, vp(c[s], ring_->p));
            }
        int limit = weil_precision_limit();
        if (best >= limit) return std::nullopt;
        return Rat(best, 1);
    }

    bool contains(const Elt& a) const override {
        if (a.rows() != spec_.n || a.cols() != spec_.n) return false;
        Elt x = a - identity();
        for (int i = 0; i < spec_.n; ++i)
            for (int j = 0; j < spec_.n; ++j) {
                const PAdicScalar& v = x.at(i, j);
                if (!entry_in_shape(i, j)) {
                    if (!v.is_zero()) return false;
                    continue;
                }
                if (spec_.filtration == FiltrationKind::PiAdic) {
                    if (v.val_pi() < spec_.level) return false;
                } else {
                    for (int s = 0; s < ring_->e; ++s) {
                        int64_t mod = std::min(pow_i64(ring_->p, spec_.level), ring_->digit_mod[s]);
                        if (v.coeffs()[s] % mod != 0) return false;
                    }
                }
            }
        return true;
    }

    Elt random_element(Rng& rng) const override { return random_at(rng, base_pi_level()); }

    Elt random_element_deep(Rng& rng, Rat nu) const override {
        Rat scaled = nu * Rat(ring_->e, 1);
        int lv = scaled.num <= 0 ? 0 : static_cast<int>((scaled.num + scaled.den - 1) / scaled.den);
        return random_at(rng, std::max(base_pi_level(), lv));
    }

    OrderedBasis ordered_basis() const override {
        OrderedBasis b;
        if (spec_.p == 2 && spec_.e == 1 && spec_.n == 1 && spec_.level == 1 &&
            spec_.filtration == FiltrationKind::PiAdic) {
            // 1 + 2 Z_2 = {+-1} x (1 + 4 Z_2) is not topologically generated by a
            // single one-unit; use -1 and 5 (a generating set, not a Lazard basis)
            Elt minus_one(ring_, 1, 1);
            minus_one.at(0, 0) = PAdicScalar(ring_, -1);
            Elt five(ring_, 1, 1);
            five.at(0, 0) = PAdicScalar(ring_, 5);
            b.elements = {minus_one, five};
            b.valuations = {Rat(1, 1), Rat(2, 1)};
            b.equi_p_valued = false;
            return b;
        }
        for (const LatticeGen& gen : lattice_basis(base_pi_level())) {
            b.elements.push_back(identity() + gen.mat);
            b.valuations.push_back(gen.val);
        }
        std::vector<size_t> order(b.elements.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](size_t x, size_t y) { return b.valuations[x] < b.valuations[y]; });
        OrderedBasis sorted;
        for (size_t i : order) {
            sorted.elements.push_back(b.elements[i]);
            sorted.valuations.push_back(b.valuations[i]);
        }
        sorted.equi_p_valued =
            std::all_of(sorted.valuations.begin(), sorted.valuations.end(),
                        [&](const Rat& r) { return r == sorted.valuations.front(); });
        return sorted;
    }

    std::vector<Elt> filtration_generators(Rat nu) const override {
        int lv = pi_level_for(nu);
        std::vector<Elt> out;
        for (const LatticeGen& gen : lattice_basis(lv)) out.push_back(identity() + gen.mat);
        return out;
    }

    std::vector<int64_t> key(const Elt& a, Rat level) const override {
        int digits;
        if (spec_.filtration == FiltrationKind::Weil) {
            int lv = level.num <= 0 ? 0 : static_cast<int>((level.num + level.den - 1) / level.den);
            digits = lv * ring_->e;
        } else {
            Rat scaled = level * Rat(ring_->e, 1);
            digits = scaled.num <= 0 ? 0 : static_cast<int>((scaled.num + scaled.den - 1) / scaled.den);
        }
        digits = std::min(digits, ring_->N);
        return (a - identity()).key_mod(digits);
    }

    std::optional<Elt> p_th_root(const Elt& x) const override {
        auto ox = omega(x);
        if (!ox || !(*ox > Rat(1, 1) + Rat(1, spec_.p - 1))) return std::nullopt;
        Elt l = matrix_log(x);
        Elt y = matrix_exp(l.div_exact_int(spec_.p));
        // the root is exact only below N - e digits; canonicalize the tail
        Elt yr = truncate_digits(y, ring_->N - ring_->e);
        Elt check = pow(yr, spec_.p) - x;
        if (!check.is_zero() && check.omega_pi() < ring_->N - ring_->e) return std::nullopt;
        return yr;
    }

    Rat omega_min() const override {
        if (spec_.filtration == FiltrationKind::Weil) return Rat(spec_.level, 1);
        return Rat(spec_.level, ring_->e);
    }

    std::string describe() const override {
        std::ostringstream os;
        os << "1+";
        if (spec_.filtration == FiltrationKind::Weil)
            os << "p^" << spec_.level;
        else
            os << "pi^" << spec_.level;
        os << "*M_" << spec_.n << " (p=" << spec_.p << ", e=" << ring_->e;
        if (spec_.shape == Shape::UnipotentUpper) os << ", unipotent";
        if (spec_.shape == Shape::Diagonal) os << ", diagonal";
        if (spec_.filtration == FiltrationKind::Weil) os << ", weil";
        os << ")";
        return os.str();
    }

    const MatrixGroupSpec& spec() const { return spec_; }

  private:
    struct LatticeGen {
        Elt mat;
        Rat val;
    };

    bool entry_in_shape(int i, int j) const {
        switch (spec_.shape) {
            case Shape::Full: return true;
            case Shape::UnipotentUpper: return i < j;
            case Shape::Diagonal: return i == j;
        }
        return false;
    }

    // base lattice level in pi-units
    int base_pi_level() const {
        return spec_.filtration == FiltrationKind::Weil ? spec_.level * ring_->e : spec_.level;
    }

    int pi_level_for(Rat nu) const {
        if (spec_.filtration == FiltrationKind::Weil) {
            // G'_nu = 1 + p^{ceil(nu)} M
            int lv = nu.num <= 0 ? 0 : static_cast<int>((nu.num + nu.den - 1) / nu.den);
            return std::max(spec_.level, lv) * ring_->e;
        }
        Rat scaled = nu * Rat(ring_->e, 1);
        int lv = scaled.num <= 0 ? 0 : static_cast<int>((scaled.num + scaled.den - 1) / scaled.den);
        return std::max(spec_.level, lv);
    }

    int weil_precision_limit() const { return ring_->digit_prec[ring_->e - 1]; }

    // Z_p-basis of the congruence lattice pi^{lv} * (shape entries), as matrices
    std::vector<LatticeGen> lattice_basis(int lv) const {
        std::vector<LatticeGen> out;
        if (lv >= ring_->N) return out;
        for (int s = 0; s < ring_->e; ++s) {
            if (lv + s >= ring_->N) continue;
            for (int i = 0; i < spec_.n; ++i)
                for (int j = 0; j < spec_.n; ++j) {
                    if (!entry_in_shape(i, j)) continue;
                    Elt m(ring_, spec_.n, spec_.n);
                    m.at(i, j) = PAdicScalar(ring_, 1).pi_shift(lv + s);
                    Rat val = spec_.filtration == FiltrationKind::Weil
                                  ? Rat((lv + s) / ring_->e + ((lv + s) % ring_->e ? 1 : 0), 1)
                                  : Rat(lv + s, ring_->e);
                    out.push_back({std::move(m), val});
                }
        }
        return out;
    }

    Elt random_at(Rng& rng, int lv) const {
        Elt x(ring_, spec_.n, spec_.n);
        std::uniform_int_distribution<int64_t> digit(0, ring_->p - 1);
        for (int i = 0; i < spec_.n; ++i)
            for (int j = 0; j < spec_.n; ++j) {
                if (!entry_in_shape(i, j)) continue;
                std::vector<int64_t> d(ring_->N, 0);
                for (int t = lv; t < ring_->N; ++t) d[t] = digit(rng);
                x.at(i, j) = PAdicScalar::from_pi_digits(ring_, d);
            }
        return identity() + x;
    }

    MatrixGroupSpec spec_;
    Ring ring_;
};

// Left regular representation of the maximal order O = Z_p<u, Pi> with
// u^2 = c (a non-residue), Pi^2 = p, Pi u = -u Pi, on the basis (1, u, Pi, uPi).
class QuaternionUnits : public FilteredGroup {
  public:
    QuaternionUnits(int64_t p, int precision_N) : ring_(make_zp(p, precision_N)) {
        if (p < 5)
            throw DomainError("quaternion-units fixture requires p >= 5");
        c_ = 0;
        for (int64_t cand = 2; cand < p; ++cand) {
            bool residue = false;
            for (int64_t x = 1; x < p; ++x)
                if (x * x % p == cand) {
                    residue = true;
                    break;
                }
            if (!residue) {
                c_ = cand;
                break;
            }
        }
        rho_u_ = basis_matrix({{0, c_, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, c_}, {0, 0, 1, 0}});
        rho_pi_ = basis_matrix({{0, 0, ring_->p, 0}, {0, 0, 0, -ring_->p}, {1, 0, 0, 0}, {0, -1, 0, 0}});
        rho_upi_ = basis_matrix({{0, 0, 0, -c_ * ring_->p}, {0, 0, ring_->p, 0}, {0, -c_, 0, 0}, {1, 0, 0, 0}});
    }

    const Ring& ring() const override { return ring_; }
    int omega_den() const override { return 2; }
    Elt identity() const override { return PAdicMatrix::identity(ring_, 4); }
    Elt mul(const Elt& a, const Elt& b) const override { return a * b; }
    Elt inv(const Elt& a) const override { return one_unit_inverse(a); }

    std::optional<Rat> omega(const Elt& a) const override {
        auto co = coords(a - identity());
        int v = pi_val(co);
        if (v >= 2 * ring_->N) return std::nullopt;
        return Rat(v, 2);
    }

    bool contains(const Elt& a) const override {
        Elt x = a - identity();
        auto co = coords(x);
        if (reconstruct(co) != x) return false;
        return pi_val(co) >= 1;
    }

    Elt random_element(Rng& rng) const override { return random_deep_w(rng, 1); }
    Elt random_element_deep(Rng& rng, Rat nu) const override {
        Rat w = nu * Rat(2, 1);
        int64_t lv = w.num <= 0 ? 1 : (w.num + w.den - 1) / w.den;
        return random_deep_w(rng, std::max<int64_t>(1, lv));
    }

    OrderedBasis ordered_basis() const override {
        OrderedBasis b;
        b.elements = {identity() + rho_pi_, identity() + rho_upi_,
                      identity() + scalar_mat(ring_->p), identity() + rho_u_.scaled(ring_->p)};
        b.valuations = {Rat(1, 2), Rat(1, 2), Rat(1, 1), Rat(1, 1)};
        b.equi_p_valued = false;
        return b;
    }

    std::vector<Elt> filtration_generators(Rat nu) const override {
        Rat w = nu * Rat(2, 1);
        int64_t lv = w.num <= 0 ? 1 : (w.num + w.den - 1) / w.den;
        lv = std::max<int64_t>(1, lv);
        // v_Pi(y) >= lv: scalar part needs p^{ceil(lv/2)}, Pi part p^{ceil((lv-1)/2)}
        int64_t a_exp = (lv + 1) / 2, c_exp = lv / 2;
        std::vector<Elt> out;
        out.push_back(identity() + scalar_mat(pow_i64(ring_->p, a_exp)));
        out.push_back(identity() + rho_u_.scaled(pow_i64(ring_->p, a_exp)));
        out.push_back(identity() + rho_pi_.scaled(pow_i64(ring_->p, c_exp)));
        out.push_back(identity() + rho_upi_.scaled(pow_i64(ring_->p, c_exp)));
        return out;
    }

    std::vector<int64_t> key(const Elt& a, Rat level) const override {
        Rat w = level * Rat(2, 1);  // v_Pi bound
        int64_t lv = w.num <= 0 ? 0 : (w.num + w.den - 1) / w.den;
        auto co = coords(a - identity());
        int64_t ab_digits = std::min<int64_t>((lv + 1) / 2, ring_->N);
        int64_t cd_digits = std::min<int64_t>(lv / 2, ring_->N);
        std::vector<int64_t> out;
        out.push_back(co[0].coeffs()[0] % pow_i64(ring_->p, ab_digits));
        out.push_back(co[1].coeffs()[0] % pow_i64(ring_->p, ab_digits));
        out.push_back(co[2].coeffs()[0] % pow_i64(ring_->p, cd_digits));
        out.push_back(co[3].coeffs()[0] % pow_i64(ring_->p, cd_digits));
        return out;
    }

    Elt log_element(const Elt& x) const override {
        Elt xm = x - identity();
        auto ox = omega(x);
        if (xm.is_zero()) return xm;
        // v_Pi(y) = w >= 1; term m has v_Pi >= m w - 2 vp(m), and
        // vp(m) <= (m-1)/(p-1), so the series dies past 2N(p-1)/(w(p-1)-2)
        int64_t w = (*ox * Rat(2, 1)).num;
        int64_t slope = w * (ring_->p - 1) - 2;
        if (slope <= 0) throw DomainError("quaternion log: outside the convergence domain");
        int64_t bound = (2 * static_cast<int64_t>(ring_->N) * (ring_->p - 1) + slope - 1) / slope;
        int pad = 0;
        for (int64_t m = 1; m <= bound; ++m) pad = std::max(pad, vp(m, ring_->p));
        Ring big = with_precision(ring_, ring_->N + pad);
        Elt xb = xm.to_ring(big);
        Elt acc(big, 4, 4);
        Elt pw = xb;
        for (int64_t m = 1; m <= bound; ++m) {
            if (m > 1) pw = pw * xb;
            Elt term = pw.div_exact_int(m);
            acc = (m % 2 == 1) ? acc + term : acc - term;
        }
        return acc.to_ring(ring_);
    }

    Elt exp_element(const Elt& x) const override {
        if (x.is_zero()) return identity();
        auto co_in = coords(x);
        int64_t w = pi_val(co_in);
        int64_t slope = w * (ring_->p - 1) - 2;
        if (slope <= 0) throw DomainError("quaternion exp: outside the convergence domain");
        int64_t bound = (2 * static_cast<int64_t>(ring_->N) * (ring_->p - 1) + slope - 1) / slope;
        int pad = 0;
        int64_t vfact = 0;
        for (int64_t m = 1; m <= bound; ++m) {
            vfact += vp(m, ring_->p);
            pad = std::max<int64_t>(pad, vfact);
        }
        Ring big = with_precision(ring_, ring_->N + static_cast<int>(pad));
        Elt xb = x.to_ring(big);
        Elt acc = PAdicMatrix::identity(big, 4);
        Elt pw = PAdicMatrix::identity(big, 4);
        for (int64_t m = 1; m <= bound; ++m) {
            pw = (pw * xb).div_exact_int(m);
            acc = acc + pw;
        }
        return acc.to_ring(ring_);
    }

    std::optional<Elt> p_th_root(const Elt& x) const override {
        auto ox = omega(x);
        if (!ox || !(*ox > Rat(1, 1) + Rat(1, ring_->p - 1))) return std::nullopt;
        Elt l = log_element(x);
        Elt y = exp_element(l.div_exact_int(ring_->p));
        // the root is exact only below N-1 digits; canonicalize through the
        // O-coordinates so the representation structure survives truncation
        auto co = coords(y - identity());
        std::array<PAdicScalar, 4> reduced;
        for (int t = 0; t < 4; ++t) {
            auto d = co[t].pi_digits();
            d[ring_->N - 1] = 0;
            reduced[t] = PAdicScalar::from_pi_digits(ring_, d);
        }
        Elt yr = identity() + reconstruct(reduced);
        Elt check = pow(yr, ring_->p) - x;
        if (!check.is_zero() && check.omega_pi() < ring_->N - 1) return std::nullopt;
        return yr;
    }

    Rat omega_min() const override { return Rat(1, 2); }
    std::string describe() const override {
        return "1+Pi*O quaternion units (p=" + std::to_string(ring_->p) +
               ", u^2=" + std::to_string(c_) + ")";
    }

  private:
    Elt basis_matrix(const std::vector<std::vector<int64_t>>& rows) const {
        Elt m(ring_, 4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) m.at(i, j) = PAdicScalar(ring_, rows[i][j]);
        return m;
    }
    Elt scalar_mat(int64_t v) const { return PAdicMatrix::identity(ring_, 4).scaled(v); }

    // O-coordinates (a, b, c, d) of X = rho(a + b u + c Pi + d uPi): column 0
    std::array<PAdicScalar, 4> coords(const Elt& x) const {
        return {x.at(0, 0), x.at(1, 0), x.at(2, 0), x.at(3, 0)};
    }
    // rho(a + b u + c Pi + d uPi) = a I + b rho(u) + c rho(Pi) + d rho(uPi)
    Elt reconstruct(const std::array<PAdicScalar, 4>& co) const {
        Elt r(ring_, 4, 4);
        for (int i = 0; i < 4; ++i) r.at(i, i) = co[0];
        auto add_scaled = [&](const Elt& basis, const PAdicScalar& s) {
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) r.at(i, j) = r.at(i, j) + basis.at(i, j) * s;
        };
        add_scaled(rho_u_, co[1]);
        add_scaled(rho_pi_, co[2]);
        add_scaled(rho_upi_, co[3]);
        return r;
    }
    // v_Pi of the coordinates: min(2 vp(a), 2 vp(b), 1 + 2 vp(c), 1 + 2 vp(d))
    int pi_val(const std::array<PAdicScalar, 4>& co) const {
        int out = 2 * ring_->N;
        for (int t = 0; t < 4; ++t) {
            if (co[t].is_zero()) continue;
            int v = vp(co[t].coeffs()[0], ring_->p);
            out = std::min(out, 2 * v + (t >= 2 ? 1 : 0));
        }
        return out;
    }
    Elt random_deep_w(Rng& rng, int64_t w) const {
        int64_t a_exp = (w + 1) / 2, c_exp = w / 2;
        std::uniform_int_distribution<int64_t> d(0, ring_->p_pow_m0 - 1);
        PAdicScalar a(ring_, d(rng) * pow_i64(ring_->p, std::min<int64_t>(a_exp, ring_->N)));
        PAdicScalar b(ring_, d(rng) * pow_i64(ring_->p, std::min<int64_t>(a_exp, ring_->N)));
        PAdicScalar c(ring_, d(rng) * pow_i64(ring_->p, std::min<int64_t>(c_exp, ring_->N)));
        PAdicScalar dd(ring_, d(rng) * pow_i64(ring_->p, std::min<int64_t>(c_exp, ring_->N)));
        return identity() + reconstruct({a, b, c, dd});
    }

    Ring ring_;
    int64_t c_;
    Elt rho_u_, rho_pi_, rho_upi_;
};

}  // namespace

MatrixGroupSpec parse_group_spec(std::istream& is) {
    MatrixGroupSpec spec;
    std::string line;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string k;
        if (!(ls >> k)) continue;
        if (k == "p") ls >> spec.p;
        else if (k == "e") ls >> spec.e;
        else if (k == "eisenstein_poly") {
            int64_t c;
            spec.eisenstein_poly.clear();
            while (ls >> c) spec.eisenstein_poly.push_back(c);
        } else if (k == "n") ls >> spec.n;
        else if (k == "level") ls >> spec.level;
        else if (k == "shape") {
            std::string s;
            ls >> s;
            if (s == "full") spec.shape = Shape::Full;
            else if (s == "unipotent") spec.shape = Shape::UnipotentUpper;
            else if (s == "diagonal") spec.shape = Shape::Diagonal;
            else throw DomainError("group spec: unknown shape " + s);
        } else if (k == "filtration") {
            std::string s;
            ls >> s;
            if (s == "pi") spec.filtration = FiltrationKind::PiAdic;
            else if (s == "weil") spec.filtration = FiltrationKind::Weil;
            else throw DomainError("group spec: unknown filtration " + s);
        } else if (k == "fixture_tag") ls >> spec.fixture_tag;
        else if (k == "precision_N") ls >> spec.precision_N;
        else if (k == "allow_unsaturated") { int v; ls >> v; spec.allow_unsaturated = v != 0; }
        else throw DomainError("group spec: unknown key " + k);
    }
    return spec;
}

void write_group_spec(std::ostream& os, const MatrixGroupSpec& spec) {
    os << "p " << spec.p << "\n";
    os << "e " << spec.e << "\n";
    if (!spec.eisenstein_poly.empty()) {
        os << "eisenstein_poly";
        for (int64_t c : spec.eisenstein_poly) os << " " << c;
        os << "\n";
    }
    os << "n " << spec.n << "\n";
    os << "level " << spec.level << "\n";
    os << "shape "
       << (spec.shape == Shape::Full ? "full"
                                     : spec.shape == Shape::UnipotentUpper ? "unipotent" : "diagonal")
       << "\n";
    os << "filtration " << (spec.filtration == FiltrationKind::Weil ? "weil" : "pi") << "\n";
    if (!spec.fixture_tag.empty()) os << "fixture_tag " << spec.fixture_tag << "\n";
    os << "precision_N " << spec.precision_N << "\n";
    if (spec.allow_unsaturated) os << "allow_unsaturated 1\n";
}

GroupPtr build_group(const MatrixGroupSpec& spec) {
    if (spec.fixture_tag == "quaternion-units") return build_quaternion_units(spec.p, spec.precision_N);
    return std::make_shared<MatrixCongruenceGroup>(spec);
}

GroupPtr build_quaternion_units(int64_t p, int precision_N) {
    return std::make_shared<QuaternionUnits>(p, precision_N);
}

FiniteQuotient::FiniteQuotient(GroupPtr g, int level, int64_t order_cap, int64_t mult_table_cap)
    : group_(std::move(g)), level_(level) {
    OrderedBasis basis = group_->ordered_basis();
    const Rat lv(level, 1);
    Elt e = group_->identity();
    reps_.push_back(e);
    index_[group_->key(e, lv)] = 0;
    parent_.push_back(-1);
    gen_of_.push_back(-1);
    std::deque<int> work{0};
    while (!work.empty()) {
        int cur = work.front();
        work.pop_front();
        for (size_t gi = 0; gi < basis.elements.size(); ++gi) {
            Elt next = group_->mul(reps_[cur], basis.elements[gi]);
            auto k = group_->key(next, lv);
            auto it = index_.find(k);
            if (it != index_.end()) continue;
            int idx = static_cast<int>(reps_.size());
            if (idx >= order_cap)
                throw BudgetError("finite_quotient: enumeration cap " + std::to_string(order_cap) +
                                  " exceeded at level " + std::to_string(level));
            index_[k] = idx;
            reps_.push_back(next);
            parent_.push_back(cur);
            gen_of_.push_back(static_cast<int>(gi));
            work.push_back(idx);
        }
    }
    // order must be a p-power
    int64_t n = order();
    while (n % group_->p() == 0) n /= group_->p();
    if (n != 1) throw DomainError("finite_quotient: order is not a p-power");

    for (const Elt& b : basis.elements) gen_idx_.push_back(index_of(b));
    inv_.resize(order());
    for (int i = 0; i < order(); ++i) {
        int idx = index_of(group_->inv(reps_[i]));
        if (idx < 0) throw DomainError("finite_quotient: inverse escaped the quotient");
        inv_[i] = idx;
    }
    if (order() * order() <= mult_table_cap) {
        table_.assign(order() * order(), -1);
        for (int i = 0; i < order(); ++i)
            for (int j = 0; j < order(); ++j) {
                int idx = index_of(group_->mul(reps_[i], reps_[j]));
                if (idx < 0) throw DomainError("finite_quotient: product escaped the quotient");
                table_[i * order() + j] = idx;
            }
    }
}

int FiniteQuotient::mul(int a, int b) const {
    if (!table_.empty()) return table_[a * order() + b];
    int idx = index_of(group_->mul(reps_[a], reps_[b]));
    if (idx < 0) throw DomainError("finite_quotient: product escaped the quotient");
    return idx;
}

int FiniteQuotient::inv(int a) const { return inv_[a]; }

int FiniteQuotient::pow(int a, int64_t n) const {
    if (n < 0) return pow(inv(a), -n);
    int acc = id();
    int base = a;
    while (n > 0) {
        if (n & 1) acc = mul(acc, base);
        base = mul(base, base);
        n >>= 1;
    }
    return acc;
}

int FiniteQuotient::index_of(const Elt& e) const {
    auto it = index_.find(group_->key(e, Rat(level_, 1)));
    return it == index_.end() ? -1 : it->second;
}

int FiniteQuotient::project_from(const FiniteQuotient& finer, int idx) const {
    int out = index_of(finer.rep(idx));
    if (out < 0) throw DomainError("finite_quotient: projection failed; incompatible quotients");
    return out;
}

namespace {

// BFS closure of a subgroup of G/G_level from exact generator representatives;
// returns the key set and appends any conjugation-closure generators found
struct SubgroupImage {
    std::map<std::vector<int64_t>, Elt> elements;  // key -> exact representative
};

SubgroupImage subgroup_closure(const FilteredGroup& g, std::vector<Elt>& gens, Rat level,
                               const std::vector<Elt>& conjugators, int64_t cap) {
    SubgroupImage img;
    bool grew = true;
    while (grew) {
        grew = false;
        img.elements.clear();
        img.elements[g.key(g.identity(), level)] = g.identity();
        std::deque<Elt> queue;
        queue.push_back(g.identity());
        while (!queue.empty()) {
            Elt cur = queue.front();
            queue.pop_front();
            for (const Elt& s : gens) {
                Elt nxt = g.mul(cur, s);
                auto k = g.key(nxt, level);
                if (img.elements.count(k)) continue;
                if (static_cast<int64_t>(img.elements.size()) >= cap)
                    throw BudgetError("lower_p_series: subgroup closure cap exceeded");
                img.elements.emplace(k, nxt);
                queue.push_back(nxt);
            }
        }
        // normal closure: conjugates of generators must stay inside
        size_t before = gens.size();
        for (size_t t = 0; t < before; ++t)
            for (const Elt& c : conjugators) {
                Elt conj = g.mul(g.mul(c, gens[t]), g.inv(c));
                if (!img.elements.count(g.key(conj, level))) {
                    gens.push_back(conj);
                    grew = true;
                }
            }
    }
    return img;
}

}  // namespace

LowerPSeries lower_p_series(const GroupPtr& g, int depth) {
    LowerPSeries out;
    OrderedBasis basis = g->ordered_basis();
    const int64_t p = g->p();
    Rat t = basis.valuations.back();  // largest basis valuation
    int64_t t_ceil = (t.num + t.den - 1) / t.den;

    std::vector<Elt> gens_i = basis.elements;
    for (int i = 1; i <= depth; ++i) {
        Rat level(t_ceil + i + 1, 1);
        if (level > Rat(g->ring()->N, g->ring()->e))
            throw PrecisionError("lower_p_series: depth " + std::to_string(depth) +
                                 " needs quotient level " + level.str() + " beyond precision");
        // next term: closure of { a^p } and { [a, x_j] } under conjugation
        std::vector<Elt> next_gens;
        for (const Elt& a : gens_i) next_gens.push_back(g->pow(a, p));
        for (const Elt& a : gens_i)
            for (const Elt& b : basis.elements) next_gens.push_back(g->commutator(a, b));

        std::vector<Elt> gens_copy = gens_i;
        SubgroupImage cur = subgroup_closure(*g, gens_copy, level, basis.elements, 1 << 22);
        SubgroupImage nxt = subgroup_closure(*g, next_gens, level, basis.elements, 1 << 22);
        if (cur.elements.size() % nxt.elements.size() != 0)
            throw DomainError("lower_p_series: non-integral index");
        out.indices.push_back(static_cast<int64_t>(cur.elements.size() / nxt.elements.size()));

        // every image element of the next term must be reachable; normality of
        // the image in the full quotient follows from the conjugation closure
        out.normal_in_quotient.push_back(true);

        // omega-filtration comparison at level t + i
        std::vector<Elt> omega_gens = g->filtration_generators(t + Rat(i, 1));
        SubgroupImage omega_img = subgroup_closure(*g, omega_gens, level, basis.elements, 1 << 22);
        bool match = omega_img.elements.size() == nxt.elements.size();
        if (match)
            for (auto& [k, e] : nxt.elements)
                if (!omega_img.elements.count(k)) {
                    match = false;
                    break;
                }
        out.omega_jumps_match.push_back(match);

        gens_i = std::move(next_gens);
    }
    return out;
}

UniformityVerdict check_uniform(const GroupPtr& g, int depth) {
    UniformityVerdict v;
    OrderedBasis basis = g->ordered_basis();
    v.finitely_generated = !basis.elements.empty();
    const int64_t p = g->p();
    const int kappa = p == 2 ? 2 : 1;  // G^p for odd p, G^4 for p = 2

    // G / G^{p^kappa}-closure abelian: commutators of basis elements must be
    // p^kappa-th powers inside the group
    v.power_quotient_abelian = true;
    for (size_t i = 0; i < basis.elements.size() && v.power_quotient_abelian; ++i)
        for (size_t j = i + 1; j < basis.elements.size(); ++j) {
            Elt c = g->commutator(basis.elements[i], basis.elements[j]);
            if (!g->omega(c)) continue;  // trivial at precision
            std::optional<Elt> root = c;
            for (int t = 0; t < kappa && root; ++t) root = g->p_th_root(*root);
            if (root && g->contains(*root)) continue;
            if (!root) {
                // constructive root unavailable; decide inside a finite quotient
                int level = static_cast<int>((basis.valuations.back().num + basis.valuations.back().den - 1) /
                                             basis.valuations.back().den) +
                            2;
                FiniteQuotient q(g, level);
                std::set<int> powers;
                for (int a = 0; a < q.order(); ++a) powers.insert(q.pow(a, pow_i64(p, kappa)));
                // subgroup generated by the powers
                std::set<int> sub{q.id()};
                std::deque<int> work{q.id()};
                while (!work.empty()) {
                    int cur = work.front();
                    work.pop_front();
                    for (int s : powers) {
                        int nx = q.mul(cur, s);
                        if (sub.insert(nx).second) work.push_back(nx);
                    }
                }
                int ci = q.index_of(c);
                if (ci >= 0 && sub.count(ci)) continue;
            }
            v.power_quotient_abelian = false;
            v.detail = "commutator of basis elements " + std::to_string(i) + "," + std::to_string(j) +
                       " is not a p^" + std::to_string(kappa) + "-th power";
        }

    LowerPSeries series = lower_p_series(g, depth);
    v.indices = series.indices;
    v.indices_constant = !series.indices.empty();
    for (int64_t idx : series.indices)
        if (idx != series.indices.front()) v.indices_constant = false;
    if (!v.indices_constant && v.detail.empty()) v.detail = "lower p-series indices are not constant";
    return v;
}

GroupPtr renormalize_valuation(const GroupPtr& g) {
    if (g->p() == 2)
        throw DomainError("renormalize_valuation: p = 2 unsupported (odd primes only)");
    OrderedBasis basis = g->ordered_basis();
    if (!basis.equi_p_valued)
        throw DomainError("renormalize_valuation: group is not equi-p-valued");
    Rat t = basis.valuations.front();
    return with_omega_shift(g, Rat(1, 1) - t);
}

}  // namespace lazardlab
