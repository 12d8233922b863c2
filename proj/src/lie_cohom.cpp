#include "lazardlab/lie_cohom.hpp"

#include <functional>

namespace lazardlab {

CEComplex ce_complex(const LieLattice& l, const LieModule& m) {
    if (m.p != l.p) throw DomainError("ce_complex: prime mismatch");
    CEComplex c;
    c.lattice = l;
    c.module = m;
    c.basis = WedgeBasis(l.rank, l.rank);
    c.complex.ring = SnfRing{l.p, m.k};
    const int64_t pk = pow_i64(l.p, m.k);
    const int d = l.rank;
    const int mr = m.rank;
    std::vector<int64_t> cons = l.constants_mod(m.k);
    auto cc = [&](int i, int j, int k) { return cons[(i * d + j) * d + k]; };

    for (int q = 0; q <= d; ++q) c.complex.dims.push_back(static_cast<Eigen::Index>(c.basis.dim(q)) * mr);
    for (int q = 0; q < d; ++q) {
        IntMat dq = IntMat::Zero(c.complex.dims[q + 1], c.complex.dims[q]);
        const auto& rows = c.basis.tuples(q + 1);
        for (size_t r = 0; r < rows.size(); ++r) {
            const std::vector<int>& J = rows[r];
            // action terms: (-1)^a x_{J_a} . w(J \ a)
            for (int a = 0; a <= q; ++a) {
                std::vector<int> I;
                for (int t = 0; t <= q; ++t)
                    if (t != a) I.push_back(J[t]);
                int col_tuple = c.basis.index_of(I);
                const IntMat& act = m.actions[J[a]];
                int sign = a % 2 == 0 ? 1 : -1;
                for (int u = 0; u < mr; ++u)
                    for (int v = 0; v < mr; ++v) {
                        int64_t x = mod_reduce(sign * act(u, v), pk);
                        if (!x) continue;
                        Eigen::Index row = c.slot(q + 1, static_cast<int>(r), u);
                        Eigen::Index col = c.slot(q, col_tuple, v);
                        dq(row, col) = mod_reduce(dq(row, col) + x, pk);
                    }
            }
            // bracket terms: (-1)^{a+b} w([x_{J_a}, x_{J_b}], J \ {a,b})
            for (int a = 0; a <= q; ++a)
                for (int b = a + 1; b <= q; ++b) {
                    std::vector<int> rest;
                    for (int t = 0; t <= q; ++t)
                        if (t != a && t != b) rest.push_back(J[t]);
                    for (int k2 = 0; k2 < d; ++k2) {
                        int64_t coef = cc(J[a], J[b], k2);
                        if (!coef) continue;
                        std::vector<int> I = rest;
                        I.push_back(k2);
                        int s = WedgeBasis::sort_sign(I);
                        if (!s) continue;
                        int sign = ((a + b) % 2 == 0 ? 1 : -1) * s;
                        int col_tuple = c.basis.index_of(I);
                        for (int u = 0; u < mr; ++u) {
                            Eigen::Index row = c.slot(q + 1, static_cast<int>(r), u);
                            Eigen::Index col = c.slot(q, col_tuple, u);
                            dq(row, col) = mod_reduce(dq(row, col) + sign * coef, pk);
                        }
                    }
                }
        }
        c.complex.diff.push_back(std::move(dq));
    }
    c.complex.validate();  // d.d = 0 exactly, with the offending entry on failure
    return c;
}

CohomReport cohomology(const CEComplex& c) {
    CohomReport rep;
    rep.side = "lie";
    rep.p = c.lattice.p;
    rep.k = c.module.k;
    rep.source = c.lattice.provenance;
    const int64_t pk = pow_i64(rep.p, rep.k);
    auto degrees = cohomology_of_complex(c.complex);
    for (auto& dd : degrees) {
        CohomDegree out;
        out.degree = dd.degree;
        out.divisors = dd.divisors;
        for (int64_t dv : dd.divisors)
            if (dv == pk) ++out.free_rank;
        out.mod_p_dim = dd.mod_p_dim;
        if (out.mod_p_dim != static_cast<int64_t>(dd.divisors.size())) rep.mod_p_consistent = false;
        rep.degrees.push_back(std::move(out));
    }
    return rep;
}

QuotientModule ce_classes(const CEComplex& c, int degree) {
    SparseMat a = degree > 0 ? SparseMat::from_dense(c.complex.diff[degree - 1])
                             : SparseMat(static_cast<int>(c.complex.dims[0]), 0);
    SparseMat b = degree < c.top_degree()
                      ? SparseMat::from_dense(c.complex.diff[degree])
                      : SparseMat(0, static_cast<int>(c.complex.dims[degree]));
    return QuotientModule(a, b, c.lattice.p, c.module.k);
}

bool is_cocycle(const CEComplex& c, int degree, const IntVec& z) {
    if (degree >= c.top_degree()) return true;
    const int64_t pk = pow_i64(c.lattice.p, c.module.k);
    const IntMat& d = c.complex.diff[degree];
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        __int128 acc = 0;
        for (Eigen::Index j = 0; j < d.cols(); ++j) acc += static_cast<__int128>(d(i, j)) * z(j);
        if (mod_reduce(static_cast<int64_t>(acc % pk), pk) != 0) return false;
    }
    return true;
}

IntVec cup_product(const CEComplex& c, int qa, const IntVec& a, int qb, const IntVec& b) {
    if (c.module.rank != 1 || !c.module.trivial())
        throw DomainError("cup_product: wedge product needs rank-1 trivial coefficients");
    if (!is_cocycle(c, qa, a) || !is_cocycle(c, qb, b))
        throw DomainError("cup_product: inputs must be cocycles");
    const int64_t pk = pow_i64(c.lattice.p, c.module.k);
    const int q = qa + qb;
    IntVec out = IntVec::Zero(c.basis.dim(q));
    for (int t = 0; t < c.basis.dim(q); ++t) {
        const std::vector<int>& I = c.basis.tuples(q)[t];
        // sum over splits of I into an increasing qa-part and qb-part
        std::vector<int> pick(qa);
        std::function<void(int, int, int)> rec = [&](int start, int depth, int shuffle_parity) {
            if (depth == qa) {
                std::vector<int> left, right;
                std::vector<bool> used(q, false);
                for (int x : pick) used[x] = true;
                int sign = 1;
                // Koszul sign of the shuffle: count inversions between blocks
                int inversions = 0;
                for (int x = 0; x < q; ++x)
                    if (used[x]) {
                        for (int y = 0; y < x; ++y)
                            if (!used[y]) ++inversions;
                    }
                sign = inversions % 2 == 0 ? 1 : -1;
                for (int x = 0; x < q; ++x) (used[x] ? left : right).push_back(I[x]);
                int ia = c.basis.index_of(left);
                int ib = c.basis.index_of(right);
                int64_t prod = mulmod(a(ia), b(ib), pk);
                out(t) = mod_reduce(out(t) + sign * prod, pk);
                return;
            }
            (void)shuffle_parity;
            for (int i = start; i <= q - (qa - depth); ++i) {
                pick[depth] = i;
                rec(i + 1, depth + 1, 0);
            }
        };
        rec(0, 0, 0);
    }
    if (!is_cocycle(c, q, out)) throw DomainError("cup_product: output failed the cocycle check");
    return out;
}

}  // namespace lazardlab
