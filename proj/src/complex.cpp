#include "lazardlab/complex.hpp"

#include <algorithm>

namespace lazardlab {

void ChainComplexInt::validate() const {
    for (size_t q = 0; q + 1 < diff.size(); ++q) {
        const IntMat& a = diff[q];
        const IntMat& b = diff[q + 1];
        if (a.rows() == 0 || b.rows() == 0) continue;
        IntMat prod = ring.is_z() ? IntMat(b * a) : mat_mul_mod(b, a, ring.modulus());
        for (Eigen::Index i = 0; i < prod.rows(); ++i)
            for (Eigen::Index j = 0; j < prod.cols(); ++j)
                if (prod(i, j) != 0)
                    throw DomainError("complex: d.d != 0 at degree " + std::to_string(q) + " entry (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
    }
}

std::vector<int64_t> homology_block_z(const IntMat& a, const IntMat& b, int64_t p, int k) {
    const int64_t pk = pow_i64(p, k);
    const Eigen::Index n = b.cols() > 0 ? b.cols() : a.rows();
    if (n == 0) return {};

    // Hermite basis of the kernel lattice of (B mod p^k) inside Z^n; entries
    // stay below p^k because the lattice contains p^k Z^n
    IntMat work_b = b.rows() > 0 ? mat_mod(b, pk) : IntMat(0, n);
    IntMat kappa = kernel_hnf_mod_pk(work_b, p, k);

    // relation generators: columns of A plus p^k * I, in kappa-coordinates
    if (a.cols() > 0 && a.rows() != n) throw DomainError("homology_block_z: shape mismatch");
    Eigen::Index ac = a.cols() > 0 ? a.cols() : 0;
    IntMat gens(n, ac + n);
    if (ac > 0) gens.leftCols(ac) = mat_mod(a, pk);
    gens.rightCols(n) = IntMat::Identity(n, n) * pk;
    IntMat rel = solve_upper_triangular(kappa, gens);

    SNFResult r = snf(rel, SnfRing{}, {});
    if (static_cast<Eigen::Index>(r.divisors.size()) < n)
        throw DomainError("homology_block_z: presentation not of full rank");
    std::vector<int64_t> out;
    for (int64_t d : r.divisors) {
        if (d < 0) d = -d;
        // the p^k I block forces full rank, so a zero divisor is a bug
        if (d == 0) throw DomainError("homology_block_z: unexpected free summand");
        if (d == 1) continue;
        int64_t t = d;
        while (t % p == 0) t /= p;
        if (t != 1 || d > pk) throw DomainError("homology_block_z: divisor not a p-power <= p^k");
        out.push_back(d);
    }
    std::sort(out.begin(), out.end());
    return out;
}

QuotientModule::QuotientModule(const SparseMat& a, const SparseMat& b, int64_t p, int k)
    : p_(p), k_(k), pk_(pow_i64(p, k)), pk2_(pow_i64(p, 2 * k)), n_(b.cols ? b.cols : a.rows) {
    const Eigen::Index n = n_;
    std::vector<int> wexp(n, 2 * k);
    if (b.rows > 0 && b.nnz() > 0) {
        SnfOptions o;
        o.want_v = true;
        o.want_v_inv = true;
        SNFResult s1 = snf_sparse(b, SnfRing{p_, 2 * k_}, o);
        for (Eigen::Index j = 0; j < n; ++j) wexp[j] = s1.col_exponents[j];
        kernel_basis_ = std::move(s1.v);
        v_inv_ = std::move(s1.v_inv);
    } else {
        kernel_basis_ = IntMat::Identity(n, n);
        v_inv_ = IntMat::Identity(n, n);
    }
    kexp_.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        kexp_[j] = k_ - std::min(wexp[j], k_);
        int64_t scale = pow_i64(p_, kexp_[j]);
        for (Eigen::Index i = 0; i < n; ++i)
            kernel_basis_(i, j) = mulmod(kernel_basis_(i, j), scale, pk2_);
    }

    // relation matrix: kappa-coordinates of the columns of A and of p^k e_i
    Eigen::Index m = (a.rows == n ? static_cast<Eigen::Index>(a.cols) : 0);
    IntMat rel = IntMat::Zero(n, m + n);
    for (Eigen::Index c = 0; c < m + n; ++c) {
        // z = V^{-1} x, then divide slot j by p^{a_j}
        std::vector<int64_t> x(n, 0);
        if (c < m) {
            for (auto& [i, val] : a.col[c]) x[i] = mod_reduce(val, pk2_);
        } else {
            x[c - m] = pk_;
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            __int128 acc = 0;
            for (Eigen::Index t = 0; t < n; ++t)
                if (x[t]) acc += static_cast<__int128>(v_inv_(j, t)) * x[t];
            int64_t z = mod_reduce(static_cast<int64_t>(acc % pk2_), pk2_);
            int64_t sc = pow_i64(p_, kexp_[j]);
            if (z % sc != 0) throw DomainError("QuotientModule: relation outside the kernel lattice");
            rel(j, c) = mod_reduce(z / sc, pk_);
        }
    }

    SnfOptions o2;
    o2.want_u = true;
    o2.want_u_inv = true;
    SNFResult s2 = snf(rel, SnfRing{p_, k_}, o2);
    u2_ = std::move(s2.u);
    u2_inv_ = std::move(s2.u_inv);
    w2_.assign(n, k_);
    for (Eigen::Index j = 0; j < std::min<Eigen::Index>(n, s2.divisors.size()); ++j)
        w2_[j] = std::min(vp(s2.divisors[j], p_), k_);

    for (Eigen::Index j = 0; j < n; ++j) {
        // row index j of the transformed coordinates carries a Z/p^{min(w2,k)} summand
        int w = w2_[j];
        if (w <= 0) continue;
        divisors_.push_back(pow_i64(p_, w));
        divisor_slot_.push_back(static_cast<int>(j));
        // generator: kappa * (U2^{-1} e_j), reduced mod p^k
        IntVec g = IntVec::Zero(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            __int128 acc = 0;
            for (Eigen::Index t = 0; t < n; ++t) acc += static_cast<__int128>(kernel_basis_(i, t)) * u2_inv_(t, j);
            g(i) = mod_reduce(static_cast<int64_t>(acc % pk_), pk_);
        }
        generators_.push_back(std::move(g));
    }
    // sort summands by divisor for stable reporting
    std::vector<size_t> order(divisors_.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) { return divisors_[x] < divisors_[y]; });
    std::vector<int64_t> ds;
    std::vector<int> sl;
    std::vector<IntVec> gs;
    for (size_t i : order) {
        ds.push_back(divisors_[i]);
        sl.push_back(divisor_slot_[i]);
        gs.push_back(generators_[i]);
    }
    divisors_ = std::move(ds);
    divisor_slot_ = std::move(sl);
    generators_ = std::move(gs);
}

std::optional<std::vector<int64_t>> QuotientModule::classify(const IntVec& z) const {
    const Eigen::Index n = n_;
    // kappa-coordinates: divide V^{-1} z by the kernel scalings; failure of
    // divisibility means z is not a cocycle mod p^k
    IntVec coords(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        __int128 acc = 0;
        for (Eigen::Index t = 0; t < n; ++t) acc += static_cast<__int128>(v_inv_(j, t)) * mod_reduce(z(t), pk2_);
        int64_t zz = mod_reduce(static_cast<int64_t>(acc % pk2_), pk2_);
        int64_t sc = pow_i64(p_, kexp_[j]);
        if (zz % sc != 0) return std::nullopt;
        coords(j) = mod_reduce(zz / sc, pk_);
    }
    std::vector<int64_t> out(divisors_.size(), 0);
    for (size_t t = 0; t < divisors_.size(); ++t) {
        Eigen::Index j = divisor_slot_[t];
        __int128 acc = 0;
        for (Eigen::Index i = 0; i < n; ++i) acc += static_cast<__int128>(u2_(j, i)) * coords(i);
        out[t] = mod_reduce(static_cast<int64_t>(acc % pk_), divisors_[t]);
    }
    return out;
}

bool QuotientModule::is_trivial_class(const IntVec& z) const {
    auto c = classify(z);
    if (!c) throw DomainError("is_trivial_class: not a cocycle");
    for (int64_t x : *c)
        if (x != 0) return false;
    return true;
}

std::vector<int64_t> homology_local(const SparseMat& a, const SparseMat& b, int64_t p, int k) {
    QuotientModule q(a, b, p, k);
    return q.divisors();
}

std::vector<DegreeDivisors> cohomology_of_complex(const ChainComplexInt& c) {
    c.validate();
    std::vector<DegreeDivisors> out;
    const int top = c.top_degree();
    for (int q = 0; q <= top; ++q) {
        DegreeDivisors dd;
        dd.degree = q;
        IntMat a = q > 0 ? c.diff[q - 1] : IntMat(c.dims[q], 0);
        IntMat b = q < static_cast<int>(c.diff.size()) ? c.diff[q] : IntMat(0, c.dims[q]);
        if (c.ring.is_z()) {
            // integral homology: divisors of coker of A restricted to ker B
            IntMat ker = kernel_lattice_z(b.rows() ? b : IntMat(0, c.dims[q]));
            IntMat rel = a.cols() > 0 ? solve_in_lattice_z(ker, a) : IntMat(ker.cols(), 0);
            SNFResult r = snf(rel, SnfRing{}, {});
            int64_t rank_free = ker.cols();
            for (int64_t d : r.divisors) {
                if (d != 0) --rank_free;
                if (d > 1 || d < -1) dd.divisors.push_back(d < 0 ? -d : d);
            }
            for (int64_t i = 0; i < rank_free; ++i) dd.divisors.push_back(0);  // 0 = free Z summand
            std::sort(dd.divisors.begin(), dd.divisors.end());
        } else {
            dd.divisors = homology_block_z(a, b, c.ring.p, c.ring.k);
            dd.mod_p_dim = c.dims[q] - rank_mod_p(a, c.ring.p) - rank_mod_p(b, c.ring.p);
        }
        out.push_back(std::move(dd));
    }
    return out;
}

}  // namespace lazardlab
