#include "lazardlab/lazard_lie.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "lazardlab/padic_matrix.hpp"

namespace lazardlab {

namespace {

int64_t sym_mod(int64_t a, int64_t m) {  // symmetric representative for io
    int64_t r = mod_reduce(a, m);
    return r > m / 2 ? r - m : r;
}

}  // namespace

void LieLattice::validate() const {
    const int d = rank;
    const int64_t m = modulus();
    auto red = [&](int64_t x) { return m ? mod_reduce(x, m) : x; };
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                if (red(c(i, j, k) + c(j, i, k)) != 0)
                    throw DomainError("LieLattice: antisymmetry fails at (" + std::to_string(i) + "," +
                                      std::to_string(j) + "," + std::to_string(k) + ")");
    // Jacobi: the cyclic sum over [x_i, [x_j, x_k]] vanishes
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    __int128 acc = 0;
                    for (int t = 0; t < d; ++t) {
                        acc += static_cast<__int128>(c(j, k, t)) * c(i, t, l);
                        acc += static_cast<__int128>(c(k, i, t)) * c(j, t, l);
                        acc += static_cast<__int128>(c(i, j, t)) * c(k, t, l);
                    }
                    int64_t v = m ? mod_reduce(static_cast<int64_t>(acc % m), m) : static_cast<int64_t>(acc);
                    if (v != 0)
                        throw DomainError("LieLattice: Jacobi fails at (" + std::to_string(i) + "," +
                                          std::to_string(j) + "," + std::to_string(k) + ";" +
                                          std::to_string(l) + ")");
                }
}

std::vector<int64_t> LieLattice::constants_mod(int k_target) const {
    if (prec_exp > 0 && k_target > prec_exp)
        throw PrecisionError("LieLattice: constants known mod p^" + std::to_string(prec_exp) +
                             ", requested p^" + std::to_string(k_target));
    int64_t m = pow_i64(p, k_target);
    std::vector<int64_t> out(constants.size());
    for (size_t t = 0; t < constants.size(); ++t) out[t] = mod_reduce(constants[t], m);
    return out;
}

IntMat LieLattice::ad_matrix(int i, int k_target) const {
    int64_t m = pow_i64(p, k_target);
    IntMat a = IntMat::Zero(rank, rank);
    for (int j = 0; j < rank; ++j)
        for (int k = 0; k < rank; ++k) a(k, j) = mod_reduce(c(i, j, k), m);
    return a;
}

LieLattice read_lattice(std::istream& is) {
    LieLattice l;
    if (!(is >> l.rank >> l.p >> l.prec_exp)) throw DomainError("lattice file: bad header");
    l.constants.assign(static_cast<size_t>(l.rank) * l.rank * l.rank, 0);
    int nv;
    if (!(is >> nv)) throw DomainError("lattice file: missing valuation count");
    for (int t = 0; t < nv; ++t) {
        int64_t num, den;
        if (!(is >> num >> den)) throw DomainError("lattice file: truncated valuations");
        l.basis_valuations.push_back(Rat(num, den));
    }
    int i, j, k;
    int64_t c;
    while (is >> i >> j >> k >> c) {
        l.set_c(i, j, k, l.prec_exp ? mod_reduce(c, l.modulus()) : c);
        l.set_c(j, i, k, l.prec_exp ? mod_reduce(-c, l.modulus()) : -c);
    }
    l.validate();
    return l;
}

void write_lattice(std::ostream& os, const LieLattice& l) {
    os << l.rank << " " << l.p << " " << l.prec_exp << "\n";
    os << l.basis_valuations.size();
    for (const Rat& v : l.basis_valuations) os << " " << v.num << " " << v.den;
    os << "\n";
    for (int i = 0; i < l.rank; ++i)
        for (int j = i + 1; j < l.rank; ++j)
            for (int k = 0; k < l.rank; ++k) {
                int64_t c = l.c(i, j, k);
                if (c == 0) continue;
                os << i << " " << j << " " << k << " " << (l.prec_exp ? sym_mod(c, l.modulus()) : c)
                   << "\n";
            }
}

namespace {

// Z_p-linear coordinate frame spanned by the logarithms of an ordered basis.
// Each matrix entry contributes e rows (its pi-power slots), scaled so that
// all rows live at the common modulus p^m0.
class LatticeFrame {
  public:
    LatticeFrame(const Ring& ring, const std::vector<Elt>& deltas) : ring_(ring) {
        const int d = static_cast<int>(deltas.size());
        rows_ = deltas[0].rows() * deltas[0].cols() * ring->e;
        a_ = IntMat::Zero(rows_, d);
        for (int k = 0; k < d; ++k) {
            IntVec col = flatten(deltas[k]);
            for (Eigen::Index r = 0; r < rows_; ++r) a_(r, k) = col(r);
        }
        SNFResult s = snf(a_, SnfRing{ring->p, ring->m0}, {});
        int wmax = 0;
        for (int k = 0; k < d; ++k)
            wmax = std::max(wmax, k < static_cast<int>(s.divisors.size())
                                      ? vp(s.divisors[k], ring->p)
                                      : ring->m0);
        prec_exp_ = ring->m0 - wmax;
        if (prec_exp_ <= 0)
            throw PrecisionError("lazard_lie: basis logarithms do not span at working precision");
    }

    // coordinates of w in the delta-frame mod p^{prec_exp}; nullopt when w is
    // not in the lattice at precision
    std::optional<IntVec> solve(const Elt& w) const {
        auto sol = solve_local(a_, flatten(w), ring_->p, ring_->m0);
        if (!sol) return std::nullopt;
        IntVec out = *sol;
        int64_t m = pow_i64(ring_->p, prec_exp_);
        for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = mod_reduce(out(i), m);
        return out;
    }

    int prec_exp() const { return prec_exp_; }

  private:
    IntVec flatten(const Elt& m) const {
        IntVec v(rows_);
        Eigen::Index t = 0;
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) {
                const auto& coeffs = m.at(i, j).coeffs();
                for (int s = 0; s < ring_->e; ++s) {
                    // slot s is a residue mod p^{m_s}; rescale to modulus p^{m0}
                    int64_t scale = pow_i64(ring_->p, ring_->m0 - ring_->digit_prec[s]);
                    v(t++) = mulmod(coeffs[s], scale, ring_->p_pow_m0);
                }
            }
        return v;
    }

    Ring ring_;
    Eigen::Index rows_;
    IntMat a_;
    int prec_exp_;
};

Rat ceil_rat(const Rat& r) { return Rat(r.num >= 0 ? (r.num + r.den - 1) / r.den : r.num / r.den, 1); }

}  // namespace

LieLattice lazard_lie(const GroupPtr& g) {
    const Ring& ring = g->ring();
    OrderedBasis basis = g->ordered_basis();
    const int d = static_cast<int>(basis.elements.size());

    std::vector<Elt> deltas;
    for (const Elt& x : basis.elements) {
        if (!g->omega(x)) throw DomainError("lazard_lie: basis element trivial at precision");
        deltas.push_back(g->log_element(x));
    }

    LatticeFrame frame(ring, deltas);
    LieLattice out;
    out.rank = d;
    out.p = ring->p;
    out.prec_exp = frame.prec_exp();
    out.constants.assign(static_cast<size_t>(d) * d * d, 0);
    out.basis_valuations = basis.valuations;
    out.provenance = g->describe();

    const int64_t mod = pow_i64(ring->p, out.prec_exp);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            Elt w = deltas[i] * deltas[j] - deltas[j] * deltas[i];
            auto coords = frame.solve(w);
            if (!coords)
                throw PrecisionError(
                    "lazard_lie: commutator [delta_" + std::to_string(i) + ", delta_" +
                    std::to_string(j) + "] is not expressible in the lattice at precision");
            for (int k = 0; k < d; ++k) {
                int64_t c = mod_reduce((*coords)(k), mod);
                out.set_c(i, j, k, c);
                out.set_c(j, i, k, mod_reduce(-c, mod));
                // filtered-freeness forces v_p(c) >= omega_i + omega_j - omega_k
                Rat need = basis.valuations[i] + basis.valuations[j] - basis.valuations[k];
                if (c != 0 && Rat(std::min(vp(c, ring->p), out.prec_exp), 1) < ceil_rat(need))
                    throw DomainError("lazard_lie: structure constant c_{" + std::to_string(i) + "," +
                                      std::to_string(j) + "}^" + std::to_string(k) +
                                      " violates the groupring valuation bound");
            }
        }
    out.validate();
    return out;
}

LatticeIdentityVerdict check_lattice_identity(const GroupPtr& g) {
    LatticeIdentityVerdict v;
    const Ring& ring = g->ring();
    if (ring->e != 1) {
        v.witness = "lattice identity check requires e = 1";
        return v;
    }
    OrderedBasis basis = g->ordered_basis();
    const int d = static_cast<int>(basis.elements.size());
    const int n = basis.elements[0].rows();
    Rat t = basis.valuations.front();
    for (const Rat& w : basis.valuations)
        if (w != t) {
            v.witness = "basis is not equi-valued";
            return v;
        }
    if (d != n * n) {
        v.witness = "rank " + std::to_string(d) + " != n^2";
        return v;
    }
    IntMat coords(n * n, d);
    for (int k = 0; k < d; ++k) {
        Elt delta = matrix_log(basis.elements[k]);
        Eigen::Index r = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) coords(r++, k) = delta.at(i, j).coeffs()[0];
    }
    SNFResult s = snf(coords, SnfRing{ring->p, ring->m0}, {});
    int64_t expect = pow_i64(ring->p, static_cast<int>(t.num / t.den));
    for (int k = 0; k < d; ++k) {
        int64_t dv = k < static_cast<int>(s.divisors.size()) ? s.divisors[k] : 0;
        if (dv != expect) {
            v.witness = "elementary divisor " + std::to_string(k) + " is " + std::to_string(dv) +
                        ", expected " + std::to_string(expect);
            return v;
        }
    }
    v.equal = true;
    return v;
}

LieModule trivial_module(const LieLattice& l, int rank, int k) {
    LieModule m;
    m.rank = rank;
    m.p = l.p;
    m.k = k;
    m.actions.assign(l.rank, IntMat::Zero(rank, rank));
    return m;
}

std::pair<IntMat, int> int_matrix_log_one_plus(const IntMat& b, int64_t p, int k_in) {
    const int64_t mod = pow_i64(p, k_in);
    IntMat bb = mat_mod(b, mod);
    for (Eigen::Index i = 0; i < bb.rows(); ++i)
        for (Eigen::Index j = 0; j < bb.cols(); ++j)
            if (bb(i, j) % p != 0) throw DomainError("int_matrix_log: input is not p * End");
    IntMat acc = IntMat::Zero(b.rows(), b.cols());
    IntMat pw = IntMat::Identity(b.rows(), b.rows());
    int lost = 0;
    for (int m = 1; m <= k_in; ++m) {
        pw = mat_mul_mod(pw, bb, mod);  // pw = B^m, entries divisible by p^m
        int v = vp(m, p);
        lost = std::max(lost, v);
        int64_t pv = pow_i64(p, v);
        int64_t unit_inv = inv_mod(m / pv, mod);
        IntMat term = pw;
        for (Eigen::Index i = 0; i < term.rows(); ++i)
            for (Eigen::Index j = 0; j < term.cols(); ++j) {
                int64_t x = term(i, j);
                if (x % pv != 0) throw PrecisionError("int_matrix_log: inexact division");
                term(i, j) = mulmod(x / pv, unit_inv, mod);
            }
        if (m % 2 == 0)
            acc = mat_mod(acc - term, mod);
        else
            acc = mat_mod(acc + term, mod);
    }
    return {acc, k_in - lost};
}

LieModule induced_module(const LieLattice& l, const GroupModule& gm, int k) {
    if (gm.p != l.p) throw DomainError("induced_module: prime mismatch");
    if (static_cast<int>(gm.rho.size()) != l.rank)
        throw DomainError("induced_module: one action matrix per basis element required");
    LieModule out;
    out.rank = gm.rank;
    out.p = l.p;
    out.k = k;
    const int64_t pk = pow_i64(l.p, k);
    for (int i = 0; i < l.rank; ++i) {
        IntMat b = mat_mod(gm.rho[i] - IntMat::Identity(gm.rank, gm.rank), pow_i64(l.p, gm.prec_exp));
        for (Eigen::Index r = 0; r < b.rows(); ++r)
            for (Eigen::Index c = 0; c < b.cols(); ++c)
                if (b(r, c) % l.p != 0)
                    throw DomainError("induced_module: rho(x_" + std::to_string(i) +
                                      ") is not in 1 + p End(M)");
        auto [lg, kout] = int_matrix_log_one_plus(b, l.p, gm.prec_exp);
        if (kout < k)
            throw PrecisionError("induced_module: action matrices too coarse for modulus p^" +
                                 std::to_string(k));
        out.actions.push_back(mat_mod(lg, pk));
    }
    // bracket compatibility: [A_i, A_j] = sum_k c_{ij}^k A_k mod p^k
    for (int i = 0; i < l.rank; ++i)
        for (int j = 0; j < l.rank; ++j) {
            IntMat lhs = mat_mod(mat_mul_mod(out.actions[i], out.actions[j], pk) -
                                     mat_mul_mod(out.actions[j], out.actions[i], pk),
                                 pk);
            IntMat rhs = IntMat::Zero(gm.rank, gm.rank);
            for (int t = 0; t < l.rank; ++t) {
                int64_t c = mod_reduce(l.c(i, j, t), pk);
                if (c) rhs = mat_mod(rhs + c * out.actions[t], pk);
            }
            if (lhs != rhs)
                throw DomainError("induced_module: bracket compatibility fails at (" +
                                  std::to_string(i) + "," + std::to_string(j) + ")");
        }
    return out;
}

GroupModule adjoint_module(const GroupPtr& g, const LieLattice& l) {
    const Ring& ring = g->ring();
    OrderedBasis basis = g->ordered_basis();
    std::vector<Elt> deltas;
    for (const Elt& x : basis.elements) deltas.push_back(g->log_element(x));
    LatticeFrame frame(ring, deltas);

    GroupModule out;
    out.rank = l.rank;
    out.p = ring->p;
    out.prec_exp = frame.prec_exp();
    const int64_t mod = pow_i64(ring->p, out.prec_exp);
    for (int i = 0; i < l.rank; ++i) {
        IntMat m(l.rank, l.rank);
        Elt xin = g->inv(basis.elements[i]);
        for (int j = 0; j < l.rank; ++j) {
            Elt conj = basis.elements[i] * deltas[j] * xin;
            auto coords = frame.solve(conj);
            if (!coords) throw DomainError("adjoint_module: conjugate escapes the lattice");
            for (int k = 0; k < l.rank; ++k) m(k, j) = mod_reduce((*coords)(k), mod);
        }
        out.rho.push_back(std::move(m));
    }
    return out;
}

bool gr_lattice_matches_group(const LieLattice& l, const GroupPtr& g, Rat up_to, std::string* detail) {
    // basis valuations agree as multisets
    OrderedBasis basis = g->ordered_basis();
    std::vector<Rat> a = l.basis_valuations, b = basis.valuations;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
        if (detail) *detail = "basis valuation multisets differ";
        return false;
    }
    // per-degree dimensions: the lattice side is free on the deltas with eps
    // acting by p, so dim gr_nu(L) = #{k : nu - omega_k is a nonnegative integer}
    auto pieces = graded_pieces(*g, up_to);
    for (const auto& piece : pieces) {
        int expect = 0;
        for (const Rat& w : a) {
            Rat diff = piece.nu - w;
            if (diff.den == 1 && diff.num >= 0) ++expect;
        }
        if (piece.dim != expect) {
            if (detail)
                *detail = "dimension mismatch at degree " + piece.nu.str() + ": group " +
                          std::to_string(piece.dim) + ", lattice " + std::to_string(expect);
            return false;
        }
    }
    return true;
}

}  // namespace lazardlab
