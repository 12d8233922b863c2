#include "lazardlab/snf.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <queue>
#include <ostream>

namespace lazardlab {

void write_matrix_text(std::ostream& os, const IntMat& a, int64_t modulus) {
    os << a.rows() << " " << a.cols() << " " << modulus << "\n";
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) os << a(i, j) << (j + 1 < a.cols() ? " " : "");
        os << "\n";
    }
}

std::pair<IntMat, int64_t> read_matrix_text(std::istream& is) {
    Eigen::Index rows, cols;
    int64_t modulus;
    if (!(is >> rows >> cols >> modulus)) throw DomainError("matrix text: bad header");
    IntMat a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            if (!(is >> a(i, j))) throw DomainError("matrix text: truncated entries");
    if (modulus != 0) a = mat_mod(a, modulus);
    return {a, modulus};
}

namespace {

using I128 = __int128;
using Mat128 = std::vector<std::vector<I128>>;

Mat128 to128(const IntMat& a) {
    Mat128 m(a.rows(), std::vector<I128>(a.cols()));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) m[i][j] = a(i, j);
    return m;
}

Mat128 ident128(Eigen::Index n) {
    Mat128 m(n, std::vector<I128>(n, 0));
    for (Eigen::Index i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

IntMat from128(const Mat128& m) {
    IntMat a(m.size(), m.empty() ? 0 : m[0].size());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            I128 x = m[i][j];
            if (x > INT64_MAX || x < INT64_MIN) throw OverflowError("snf: transform entry exceeds int64");
            a(i, j) = static_cast<int64_t>(x);
        }
    return a;
}

constexpr I128 kGrowthCap = (static_cast<I128>(1) << 120);

I128 iabs128(I128 x) { return x < 0 ? -x : x; }

I128 mul128(I128 a, I128 b) {
    if (a == 0 || b == 0) return 0;
    I128 r = a * b;
    I128 aa = a < 0 ? -a : a, bb = b < 0 ? -b : b;
    if (aa > kGrowthCap / bb) throw OverflowError("snf: integer entry growth exceeded working precision");
    return r;
}

// quotient with balanced remainder, |a - q*b| <= |b|/2; keeps entry growth tame
I128 balanced_quot(I128 a, I128 b) {
    I128 q = a / b;
    I128 r = a - q * b;
    I128 babs = b < 0 ? -b : b;
    if (2 * (r < 0 ? -r : r) > babs) q += (r < 0) == (b < 0) ? 1 : -1;
    return q;
}

// Dense eliminator with unimodular transform tracking. Row ops update u/u_inv,
// column ops update v/v_inv, so u*A_orig*v == A holds throughout.
struct DenseWork {
    IntMat a;
    IntMat u, u_inv, v, v_inv;
    SnfOptions opts;
    int64_t mod;  // 0 for Z

    DenseWork(const IntMat& in, const SnfOptions& o, int64_t m) : a(in), opts(o), mod(m) {
        if (opts.want_u) u = IntMat::Identity(a.rows(), a.rows());
        if (opts.want_u_inv) u_inv = IntMat::Identity(a.rows(), a.rows());
        if (opts.want_v) v = IntMat::Identity(a.cols(), a.cols());
        if (opts.want_v_inv) v_inv = IntMat::Identity(a.cols(), a.cols());
        if (mod) a = mat_mod(a, mod);
    }

    int64_t red(int64_t x) const { return mod ? mod_reduce(x, mod) : x; }

    void swap_rows(Eigen::Index i, Eigen::Index j) {
        if (i == j) return;
        a.row(i).swap(a.row(j));
        if (opts.want_u) u.row(i).swap(u.row(j));
        if (opts.want_u_inv) u_inv.col(i).swap(u_inv.col(j));
    }
    void swap_cols(Eigen::Index i, Eigen::Index j) {
        if (i == j) return;
        a.col(i).swap(a.col(j));
        if (opts.want_v) v.col(i).swap(v.col(j));
        if (opts.want_v_inv) v_inv.row(i).swap(v_inv.row(j));
    }
    // row_i -= c * row_j
    void row_axpy(Eigen::Index i, Eigen::Index j, int64_t c) {
        if (c == 0) return;
        axpy_vec(a, i, j, c, true);
        if (opts.want_u) axpy_vec(u, i, j, c, true);
        if (opts.want_u_inv) axpy_vec_cols(u_inv, j, i, -c);  // inverse op on the other side
    }
    // col_i -= c * col_j
    void col_axpy(Eigen::Index i, Eigen::Index j, int64_t c) {
        if (c == 0) return;
        axpy_vec_cols(a, i, j, c);
        if (opts.want_v) axpy_vec_cols(v, i, j, c);
        if (opts.want_v_inv) axpy_vec(v_inv, j, i, -c, true);
    }
    void scale_row(Eigen::Index i, int64_t s, int64_t s_inv) {
        scale_vec_row(a, i, s);
        if (opts.want_u) scale_vec_row(u, i, s);
        if (opts.want_u_inv) scale_vec_col(u_inv, i, s_inv);
    }
    void scale_col(Eigen::Index j, int64_t s, int64_t s_inv) {
        scale_vec_col(a, j, s);
        if (opts.want_v) scale_vec_col(v, j, s);
        if (opts.want_v_inv) scale_vec_row(v_inv, j, s_inv);
    }

  private:
    void axpy_vec(IntMat& m_, Eigen::Index i, Eigen::Index j, int64_t c, bool) {
        for (Eigen::Index t = 0; t < m_.cols(); ++t) {
            if (mod)
                m_(i, t) = mod_reduce(m_(i, t) - mulmod(c, m_(j, t), mod), mod);
            else
                m_(i, t) = checked_add(m_(i, t), -checked_mul(c, m_(j, t)));
        }
    }
    void axpy_vec_cols(IntMat& m_, Eigen::Index i, Eigen::Index j, int64_t c) {
        for (Eigen::Index t = 0; t < m_.rows(); ++t) {
            if (mod)
                m_(t, i) = mod_reduce(m_(t, i) - mulmod(c, m_(t, j), mod), mod);
            else
                m_(t, i) = checked_add(m_(t, i), -checked_mul(c, m_(t, j)));
        }
    }
    void scale_vec_row(IntMat& m_, Eigen::Index i, int64_t s) {
        for (Eigen::Index t = 0; t < m_.cols(); ++t)
            m_(i, t) = mod ? mulmod(m_(i, t), s, mod) : checked_mul(m_(i, t), s);
    }
    void scale_vec_col(IntMat& m_, Eigen::Index j, int64_t s) {
        for (Eigen::Index t = 0; t < m_.rows(); ++t)
            m_(t, j) = mod ? mulmod(m_(t, j), s, mod) : checked_mul(m_(t, j), s);
    }
};

SNFResult finish(DenseWork& w, std::vector<int64_t> divisors, std::vector<int> exps) {
    SNFResult r;
    r.divisors = std::move(divisors);
    r.col_exponents = std::move(exps);
    if (w.opts.want_u) r.u = std::move(w.u);
    if (w.opts.want_u_inv) r.u_inv = std::move(w.u_inv);
    if (w.opts.want_v) r.v = std::move(w.v);
    if (w.opts.want_v_inv) r.v_inv = std::move(w.v_inv);
    return r;
}

struct Snf128 {
    std::vector<int64_t> divisors;
    Mat128 u, u_inv, v, v_inv;
};

Snf128 snf_z_128(const IntMat& in, const SnfOptions& opts) {
    Mat128 a = to128(in);
    const Eigen::Index rows = in.rows(), cols = in.cols(), nmin = std::min(rows, cols);
    Mat128 u, u_inv, v, v_inv;
    if (opts.want_u) u = ident128(rows);
    if (opts.want_u_inv) u_inv = ident128(rows);
    if (opts.want_v) v = ident128(cols);
    if (opts.want_v_inv) v_inv = ident128(cols);

    auto swap_rows = [&](Eigen::Index i, Eigen::Index j) {
        if (i == j) return;
        std::swap(a[i], a[j]);
        if (opts.want_u) std::swap(u[i], u[j]);
        if (opts.want_u_inv)
            for (Eigen::Index t = 0; t < rows; ++t) std::swap(u_inv[t][i], u_inv[t][j]);
    };
    auto swap_cols = [&](Eigen::Index i, Eigen::Index j) {
        if (i == j) return;
        for (Eigen::Index t = 0; t < rows; ++t) std::swap(a[t][i], a[t][j]);
        if (opts.want_v)
            for (Eigen::Index t = 0; t < cols; ++t) std::swap(v[t][i], v[t][j]);
        if (opts.want_v_inv) std::swap(v_inv[i], v_inv[j]);
    };
    auto row_axpy = [&](Eigen::Index i, Eigen::Index j, I128 c) {  // row_i -= c*row_j
        if (c == 0) return;
        for (Eigen::Index t = 0; t < cols; ++t) a[i][t] -= mul128(c, a[j][t]);
        if (opts.want_u)
            for (Eigen::Index t = 0; t < rows; ++t) u[i][t] -= mul128(c, u[j][t]);
        if (opts.want_u_inv)
            for (Eigen::Index t = 0; t < rows; ++t) u_inv[t][j] += mul128(c, u_inv[t][i]);
    };
    auto col_axpy = [&](Eigen::Index i, Eigen::Index j, I128 c) {  // col_i -= c*col_j
        if (c == 0) return;
        for (Eigen::Index t = 0; t < rows; ++t) a[t][i] -= mul128(c, a[t][j]);
        if (opts.want_v)
            for (Eigen::Index t = 0; t < cols; ++t) v[t][i] -= mul128(c, v[t][j]);
        if (opts.want_v_inv)
            for (Eigen::Index t = 0; t < cols; ++t) v_inv[j][t] += mul128(c, v_inv[i][t]);
    };
    auto negate_row = [&](Eigen::Index i) {
        for (Eigen::Index t = 0; t < cols; ++t) a[i][t] = -a[i][t];
        if (opts.want_u)
            for (Eigen::Index t = 0; t < rows; ++t) u[i][t] = -u[i][t];
        if (opts.want_u_inv)
            for (Eigen::Index t = 0; t < rows; ++t) u_inv[t][i] = -u_inv[t][i];
    };

    Eigen::Index s = 0;
    while (s < nmin) {
        // global min-abs pivot in the trailing block, re-selected after every
        // reduction pass; staying on one position compounds entry growth
        Eigen::Index pi = -1, pj = -1;
        I128 best = 0;
        for (Eigen::Index i = s; i < rows; ++i)
            for (Eigen::Index j = s; j < cols; ++j) {
                I128 x = a[i][j] < 0 ? -a[i][j] : a[i][j];
                if (x != 0 && (pi < 0 || x < best)) {
                    best = x;
                    pi = i;
                    pj = j;
                }
            }
        if (pi < 0) break;
        swap_rows(s, pi);
        swap_cols(s, pj);

        bool clear = true;
        for (Eigen::Index i = s + 1; i < rows; ++i) {
            if (a[i][s] == 0) continue;
            row_axpy(i, s, balanced_quot(a[i][s], a[s][s]));
            if (a[i][s] != 0) clear = false;  // strictly smaller remainder left behind
        }
        for (Eigen::Index j = s + 1; j < cols; ++j) {
            if (a[s][j] == 0) continue;
            col_axpy(j, s, balanced_quot(a[s][j], a[s][s]));
            if (a[s][j] != 0) clear = false;
        }
        if (!clear) continue;  // re-pivot on the smaller remainder
        // the pivot's row and column are clear; force divisibility of the block
        bool redo = false;
        for (Eigen::Index i = s + 1; i < rows && !redo; ++i)
            for (Eigen::Index j = s + 1; j < cols && !redo; ++j)
                if (a[i][j] % a[s][s] != 0) {
                    row_axpy(s, i, -1);  // row_s += row_i
                    redo = true;
                }
        if (redo) continue;
        if (a[s][s] < 0) negate_row(s);
        ++s;
    }
    std::vector<int64_t> div(nmin, 0);
    for (Eigen::Index i = 0; i < s; ++i) {
        if (a[i][i] > INT64_MAX) throw OverflowError("snf: divisor exceeds int64");
        div[i] = static_cast<int64_t>(a[i][i]);
    }
    Snf128 r;
    r.divisors = std::move(div);
    r.u = std::move(u);
    r.u_inv = std::move(u_inv);
    r.v = std::move(v);
    r.v_inv = std::move(v_inv);
    return r;
}

SNFResult snf_dense_z(const IntMat& in, const SnfOptions& opts) {
    Snf128 w = snf_z_128(in, opts);
    SNFResult r;
    r.divisors = std::move(w.divisors);
    if (opts.want_u) r.u = from128(w.u);
    if (opts.want_u_inv) r.u_inv = from128(w.u_inv);
    if (opts.want_v) r.v = from128(w.v);
    if (opts.want_v_inv) r.v_inv = from128(w.v_inv);
    return r;
}

SNFResult snf_dense_local(const IntMat& in, int64_t p, int k, const SnfOptions& opts) {
    int64_t pk = pow_i64(p, k);
    DenseWork w(in, opts, pk);
    IntMat& a = w.a;
    const Eigen::Index rows = a.rows(), cols = a.cols(), nmin = std::min(rows, cols);
    std::vector<int> exps;
    Eigen::Index s = 0;
    while (s < nmin) {
        Eigen::Index pi = -1, pj = -1;
        int bestv = k;
        for (Eigen::Index i = s; i < rows; ++i)
            for (Eigen::Index j = s; j < cols; ++j) {
                if (a(i, j) == 0) continue;
                int vv = vp(a(i, j), p);
                if (vv < bestv) {
                    bestv = vv;
                    pi = i;
                    pj = j;
                }
            }
        if (pi < 0) break;
        w.swap_rows(s, pi);
        w.swap_cols(s, pj);
        int64_t pv = pow_i64(p, bestv);
        int64_t unit = a(s, s) / pv;
        w.scale_col(s, inv_mod(unit, pk), mod_reduce(unit, pk));
        for (Eigen::Index i = s + 1; i < rows; ++i)
            if (a(i, s) != 0) w.row_axpy(i, s, a(i, s) / pv);
        for (Eigen::Index j = s + 1; j < cols; ++j)
            if (a(s, j) != 0) w.col_axpy(j, s, a(s, j) / pv);
        exps.push_back(bestv);
        ++s;
    }
    std::vector<int64_t> div(nmin, 0);
    std::vector<int> colexp(cols, k);
    for (Eigen::Index i = 0; i < nmin; ++i)
        div[i] = i < s ? pow_i64(p, exps[i]) : pk;
    for (Eigen::Index i = 0; i < s; ++i) colexp[i] = exps[i];
    return finish(w, std::move(div), std::move(colexp));
}

// Sparse local elimination, column-major. Row operations are only ever used
// to clear the pivot column after its row has been emptied, so they touch the
// pivot column alone and no U tracking is needed; V and V^{-1} are kept dense.
SNFResult snf_sparse_local(const SparseMat& in, int64_t p, int k, const SnfOptions& opts) {
    if (opts.want_u || opts.want_u_inv)
        throw DomainError("snf_sparse: U transforms not supported on the sparse path");
    int64_t pk = pow_i64(p, k);
    const int rows = in.rows, cols = in.cols;
    std::vector<std::map<int, int64_t>> col(cols);
    for (int j = 0; j < cols; ++j)
        for (auto& [i, x] : in.col[j]) {
            int64_t xv = mod_reduce(x, pk);
            if (xv) col[j][i] = xv;
        }

    IntMat v, v_inv;
    if (opts.want_v) v = IntMat::Identity(cols, cols);
    if (opts.want_v_inv) v_inv = IntMat::Identity(cols, cols);

    auto scale_col = [&](int j, int64_t s, int64_t s_inv) {
        for (auto& [i, x] : col[j]) x = mulmod(x, s, pk);
        if (opts.want_v)
            for (int t = 0; t < cols; ++t) v(t, j) = mulmod(v(t, j), s, pk);
        if (opts.want_v_inv)
            for (int t = 0; t < cols; ++t) v_inv(j, t) = mulmod(v_inv(j, t), s_inv, pk);
    };
    auto col_axpy = [&](int j, int jsrc, int64_t c) {  // col_j -= c * col_jsrc
        if (c == 0) return;
        for (auto& [i, x] : col[jsrc]) {
            int64_t& slot = col[j][i];
            slot = mod_reduce(slot - mulmod(c, x, pk), pk);
            if (slot == 0) col[j].erase(i);
        }
        if (opts.want_v)
            for (int t = 0; t < cols; ++t) v(t, j) = mod_reduce(v(t, j) - mulmod(c, v(t, jsrc), pk), pk);
        if (opts.want_v_inv)
            for (int t = 0; t < cols; ++t)
                v_inv(jsrc, t) = mod_reduce(v_inv(jsrc, t) + mulmod(c, v_inv(j, t), pk), pk);
    };

    std::vector<bool> col_done(cols, false), row_done(rows, false);
    std::vector<int> pivot_cols;
    std::vector<int> exps;
    int val_floor = 0;  // no remaining entry has valuation below this
    while (true) {
        // pivot: minimal valuation, then fewest entries in its column; stop the
        // scan early once an entry at the known floor valuation is found
        int bi = -1, bj = -1, bv = k;
        size_t bsize = 0;
        for (int j = 0; j < cols && bv > val_floor; ++j) {
            if (col_done[j]) continue;
            for (auto& [i, x] : col[j]) {
                if (row_done[i]) continue;
                int vv = vp(x, p);
                if (vv < bv || (vv == bv && bj >= 0 && col[j].size() < bsize)) {
                    bv = vv;
                    bi = i;
                    bj = j;
                    bsize = col[j].size();
                    if (bv <= val_floor) break;
                }
            }
        }
        if (bj < 0) break;
        val_floor = bv;
        int64_t pv = pow_i64(p, bv);
        int64_t unit = mod_reduce(col[bj][bi] / pv, pk);
        scale_col(bj, inv_mod(unit, pk), unit);
        // clear pivot row via column ops
        for (int j = 0; j < cols; ++j) {
            if (j == bj || col_done[j]) continue;
            auto it = col[j].find(bi);
            if (it == col[j].end()) continue;
            col_axpy(j, bj, it->second / pv);
        }
        // clear pivot column via (untracked) row ops; pivot row is empty elsewhere
        int64_t diag = col[bj][bi];
        col[bj].clear();
        col[bj][bi] = diag;
        col_done[bj] = true;
        row_done[bi] = true;
        pivot_cols.push_back(bj);
        exps.push_back(bv);
    }
    // order pivot columns first (ascending valuation is automatic)
    SNFResult r;
    const int nmin = std::min(rows, cols);
    r.divisors.assign(nmin, pk);
    r.col_exponents.assign(cols, k);
    std::vector<int> perm;  // perm[s] = original column placed at slot s
    perm.reserve(cols);
    for (size_t t = 0; t < pivot_cols.size(); ++t) perm.push_back(pivot_cols[t]);
    for (int j = 0; j < cols; ++j)
        if (!col_done[j]) perm.push_back(j);
    for (size_t s = 0; s < exps.size() && s < static_cast<size_t>(nmin); ++s) {
        r.divisors[s] = pow_i64(p, exps[s]);
        r.col_exponents[s] = exps[s];
    }
    if (opts.want_v) {
        r.v = IntMat(cols, cols);
        for (int s = 0; s < cols; ++s) r.v.col(s) = v.col(perm[s]);
    }
    if (opts.want_v_inv) {
        r.v_inv = IntMat(cols, cols);
        for (int s = 0; s < cols; ++s) r.v_inv.row(s) = v_inv.row(perm[s]);
    }
    return r;
}

}  // namespace

SNFResult snf(const IntMat& a, const SnfRing& ring, const SnfOptions& opts) {
    if (ring.is_z()) return snf_dense_z(a, opts);
    if (a.cols() > 512 && !opts.want_u && !opts.want_u_inv)
        return snf_sparse_local(SparseMat::from_dense(a), ring.p, ring.k, opts);
    return snf_dense_local(a, ring.p, ring.k, opts);
}

SNFResult snf_sparse(const SparseMat& a, const SnfRing& ring, const SnfOptions& opts) {
    if (ring.is_z()) return snf_dense_z(a.to_dense(), opts);
    if (opts.want_u || opts.want_u_inv) return snf_dense_local(a.to_dense(), ring.p, ring.k, opts);
    return snf_sparse_local(a, ring.p, ring.k, opts);
}

IntMat kernel_lattice_z(const IntMat& a) {
    if (a.cols() == 0) return IntMat(a.cols(), 0);
    if (a.rows() == 0) return IntMat::Identity(a.cols(), a.cols());
    SnfOptions o;
    o.want_v = true;
    Snf128 r = snf_z_128(a, o);
    std::vector<Eigen::Index> free_cols;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        if (j >= static_cast<Eigen::Index>(r.divisors.size()) || r.divisors[j] == 0) free_cols.push_back(j);
    Mat128 k(a.cols(), std::vector<I128>(free_cols.size()));
    for (size_t t = 0; t < free_cols.size(); ++t)
        for (Eigen::Index i = 0; i < a.cols(); ++i) k[i][t] = r.v[i][free_cols[t]];
    return from128(k);
}

IntMat solve_in_lattice_z(const IntMat& a, const IntMat& t) {
    SnfOptions o;
    o.want_u = true;
    o.want_v = true;
    Snf128 r = snf_z_128(a, o);
    Eigen::Index nmin = std::min(a.rows(), a.cols());
    Mat128 x(a.cols(), std::vector<I128>(t.cols(), 0));
    for (Eigen::Index c = 0; c < t.cols(); ++c) {
        std::vector<I128> y(a.cols(), 0);
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            I128 rhs = 0;
            for (Eigen::Index j = 0; j < a.rows(); ++j) rhs += mul128(r.u[i][j], t(j, c));
            int64_t d = i < nmin ? r.divisors[i] : 0;
            if (d == 0) {
                if (rhs != 0) throw DomainError("solve_in_lattice: target not in lattice");
                continue;
            }
            if (rhs % d != 0) throw DomainError("solve_in_lattice: target not in lattice");
            if (i < a.cols()) y[i] = rhs / d;
        }
        for (Eigen::Index i = 0; i < a.cols(); ++i) {
            I128 acc = 0;
            for (Eigen::Index j = 0; j < a.cols(); ++j) acc += mul128(r.v[i][j], y[j]);
            x[i][c] = acc;
        }
    }
    IntMat out = from128(x);
    if (a * out != t) throw DomainError("solve_in_lattice: residual check failed");
    return out;
}

IntMat kernel_hnf_mod_pk(const IntMat& b, int64_t p, int k) {
    const int64_t pk = pow_i64(p, k);
    const Eigen::Index n = b.cols();
    Mat128 gen;  // columns as rows of this list for convenience: gen[c] is a column vector
    auto push_col = [&](std::vector<I128> c) { gen.push_back(std::move(c)); };
    if (b.rows() == 0) {
        for (Eigen::Index i = 0; i < n; ++i) {
            std::vector<I128> e(n, 0);
            e[i] = 1;
            push_col(std::move(e));
        }
    } else {
        IntMat m1(b.rows(), n + b.rows());
        m1 << b, IntMat::Identity(b.rows(), b.rows()) * pk;
        SnfOptions o;
        o.want_v = true;
        Snf128 r = snf_z_128(m1, o);
        for (Eigen::Index j = 0; j < m1.cols(); ++j) {
            bool free_col = j >= static_cast<Eigen::Index>(r.divisors.size()) || r.divisors[j] == 0;
            if (!free_col) continue;
            std::vector<I128> c(n);
            for (Eigen::Index i = 0; i < n; ++i) c[i] = r.v[i][j];
            push_col(std::move(c));
        }
        for (Eigen::Index i = 0; i < n; ++i) {  // p^k Z^n is contained in the kernel
            std::vector<I128> e(n, 0);
            e[i] = pk;
            push_col(std::move(e));
        }
    }
    // bottom-up column Hermite reduction; the p^k e_i generators bound the result
    std::vector<std::vector<I128>> fixed(n);
    std::vector<std::vector<I128>*> active;
    for (auto& c : gen) active.push_back(&c);
    for (Eigen::Index row = n - 1; row >= 0; --row) {
        // euclid all active columns' entries at this row into one
        std::vector<I128>* piv = nullptr;
        bool changed = true;
        while (changed) {
            changed = false;
            piv = nullptr;
            for (auto* c : active) {
                if ((*c)[row] == 0) continue;
                if (!piv || iabs128((*c)[row]) < iabs128((*piv)[row])) piv = c;
            }
            if (!piv) break;
            for (auto* c : active) {
                if (c == piv || (*c)[row] == 0) continue;
                I128 q = (*c)[row] / (*piv)[row];
                for (Eigen::Index i = 0; i <= row; ++i) (*c)[i] -= mul128(q, (*piv)[i]);
                if ((*c)[row] != 0) changed = true;
            }
        }
        if (!piv) throw DomainError("kernel_hnf_mod_pk: kernel lattice rank defect");
        if ((*piv)[row] < 0)
            for (Eigen::Index i = 0; i <= row; ++i) (*piv)[i] = -(*piv)[i];
        fixed[row] = *piv;
        active.erase(std::find(active.begin(), active.end(), piv));
    }
    // reduce above-diagonal entries modulo the row diagonal
    for (Eigen::Index j = n - 1; j >= 0; --j)
        for (Eigen::Index i = j - 1; i >= 0; --i) {
            I128 q = fixed[j][i] >= 0 ? fixed[j][i] / fixed[i][i] : -((-fixed[j][i] + fixed[i][i] - 1) / fixed[i][i]);
            if (q == 0) continue;
            for (Eigen::Index t = 0; t <= i; ++t) fixed[j][t] -= mul128(q, fixed[i][t]);
        }
    IntMat h = IntMat::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i <= j; ++i) {
            if (fixed[j][i] > INT64_MAX || fixed[j][i] < INT64_MIN)
                throw OverflowError("kernel_hnf_mod_pk: entry exceeds int64");
            h(i, j) = static_cast<int64_t>(fixed[j][i]);
        }
    return h;
}

IntMat solve_upper_triangular(const IntMat& h, const IntMat& t) {
    const Eigen::Index n = h.rows();
    IntMat z = IntMat::Zero(n, t.cols());
    for (Eigen::Index c = 0; c < t.cols(); ++c)
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            I128 acc = t(i, c);
            for (Eigen::Index j = i + 1; j < n; ++j) acc -= static_cast<I128>(h(i, j)) * z(j, c);
            if (acc % h(i, i) != 0) throw DomainError("solve_upper_triangular: target not in lattice");
            I128 q = acc / h(i, i);
            if (q > INT64_MAX || q < INT64_MIN) throw OverflowError("solve_upper_triangular: overflow");
            z(i, c) = static_cast<int64_t>(q);
        }
    return z;
}

std::optional<IntVec> solve_local(const IntMat& a, const IntVec& b, int64_t p, int k) {
    int64_t pk = pow_i64(p, k);
    SnfOptions o;
    o.want_u = true;
    o.want_v = true;
    SNFResult r = snf(a, SnfRing{p, k}, o);
    IntVec rhs = IntVec::Zero(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        __int128 acc = 0;
        for (Eigen::Index j = 0; j < a.rows(); ++j) acc += static_cast<__int128>(r.u(i, j)) * b(j);
        rhs(i) = mod_reduce(static_cast<int64_t>(acc % pk), pk);
    }
    IntVec y = IntVec::Zero(a.cols());
    Eigen::Index nmin = std::min(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        int64_t d = i < nmin ? r.divisors[i] : pk;
        int64_t rv = rhs(i);
        if (d >= pk || d == 0) {
            if (rv != 0) return std::nullopt;
            continue;
        }
        if (rv % d != 0) return std::nullopt;
        if (i < a.cols()) y(i) = rv / d;
    }
    IntVec x = IntVec::Zero(a.cols());
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
        __int128 acc = 0;
        for (Eigen::Index j = 0; j < a.cols(); ++j) acc += static_cast<__int128>(r.v(i, j)) * y(j);
        x(i) = mod_reduce(static_cast<int64_t>(acc % pk), pk);
    }
    return x;
}

// ----- Howell span -----

namespace {

// dense accumulator with touched-row tracking, the usual sparse-elimination
// workspace; reused across calls through a thread-local scratch
struct HowellScratch {
    std::vector<int64_t> buf;
    std::priority_queue<int, std::vector<int>, std::greater<int>> heap;
};

thread_local HowellScratch howell_scratch;

}  // namespace

void HowellSpan::add(Col c) {
    if (pivot_.empty()) {
        pivot_.resize(rows_);
        pivot_val_.assign(rows_, k_);
    }
    std::vector<Col> queue;
    queue.push_back(std::move(c));
    HowellScratch& ws = howell_scratch;
    if (static_cast<int>(ws.buf.size()) < rows_) ws.buf.assign(rows_, 0);
    while (!queue.empty()) {
        Col cur = std::move(queue.back());
        queue.pop_back();
        auto& buf = ws.buf;
        auto& heap = ws.heap;
        for (auto& [i, x] : cur) {
            int64_t v = mod_reduce(buf[i] + x, pk_);
            if (buf[i] == 0 && v != 0) heap.push(i);
            buf[i] = v;
        }
        int installed_at = -1;
        while (!heap.empty()) {
            int r = heap.top();
            heap.pop();
            if (buf[r] == 0) continue;
            if (!heap.empty() && heap.top() == r) continue;  // duplicate
            int v = vp(buf[r], p_);
            if (v >= k_) {
                buf[r] = 0;
                continue;
            }
            if (!pivot_[r] || v < pivot_val_[r]) {
                // drain the accumulator into a normalized column and install it;
                // a displaced pivot re-enters through the queue
                Col nc;
                nc.push_back({r, buf[r]});
                buf[r] = 0;
                while (!heap.empty()) {
                    int i = heap.top();
                    heap.pop();
                    if (buf[i] == 0) continue;
                    nc.push_back({i, buf[i]});
                    buf[i] = 0;
                }
                int64_t unit_inv = inv_mod(nc.front().second / pow_i64(p_, v), pk_);
                for (auto& [i, x] : nc) x = mulmod(x, unit_inv, pk_);
                if (pivot_[r]) queue.push_back(std::move(*pivot_[r]));
                pivot_[r] = nc;
                pivot_val_[r] = v;
                installed_at = r;
                if (v > 0) {
                    int64_t mult = pow_i64(p_, k_ - v);
                    Col tail;
                    for (auto& [i, x] : nc) {
                        int64_t y = mulmod(x, mult, pk_);
                        if (y) tail.push_back({i, y});
                    }
                    if (!tail.empty()) queue.push_back(std::move(tail));
                }
                break;
            }
            // eliminate against the installed pivot (lead value p^{pivot_val})
            int64_t q = buf[r] / pow_i64(p_, pivot_val_[r]);
            for (auto& [i, x] : *pivot_[r]) {
                int64_t nv = mod_reduce(buf[i] - mulmod(q, x, pk_), pk_);
                if (buf[i] == 0 && nv != 0) heap.push(i);
                buf[i] = nv;
            }
        }
        (void)installed_at;
    }
}

HowellSpan::Col HowellSpan::reduce(Col c) const {
    HowellScratch& ws = howell_scratch;
    if (static_cast<int>(ws.buf.size()) < rows_) ws.buf.assign(rows_, 0);
    auto& buf = ws.buf;
    auto& heap = ws.heap;
    for (auto& [i, x] : c) {
        int64_t v = mod_reduce(buf[i] + x, pk_);
        if (buf[i] == 0 && v != 0) heap.push(i);
        buf[i] = v;
    }
    Col out;
    while (!heap.empty()) {
        int r = heap.top();
        heap.pop();
        if (buf[r] == 0) continue;
        if (!heap.empty() && heap.top() == r) continue;
        if (pivot_.empty() || !pivot_[r]) {
            out.push_back({r, buf[r]});
            buf[r] = 0;
            continue;
        }
        int64_t pv = pow_i64(p_, pivot_val_[r]);
        int64_t q = buf[r] / pv;  // canonical residue below the pivot valuation
        if (q == 0) {
            out.push_back({r, buf[r]});
            buf[r] = 0;
            continue;
        }
        for (auto& [i, x] : *pivot_[r]) {
            int64_t nv = mod_reduce(buf[i] - mulmod(q, x, pk_), pk_);
            if (buf[i] == 0 && nv != 0 && i != r) heap.push(i);
            buf[i] = nv;
        }
        if (buf[r] != 0) {
            out.push_back({r, buf[r]});
            buf[r] = 0;
        }
    }
    return out;
}

std::vector<int64_t> module_divisors_of_columns(const std::vector<HowellSpan::Col>& cols, int64_t p, int k) {
    // compress onto the union of occupied rows
    std::map<int, int> row_of;
    for (auto& c : cols)
        for (auto& [i, x] : c) row_of.emplace(i, 0);
    int nr = 0;
    for (auto& [i, slot] : row_of) slot = nr++;
    IntMat m = IntMat::Zero(std::max(nr, 1), static_cast<Eigen::Index>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j)
        for (auto& [i, x] : cols[j]) m(row_of[i], j) = x;
    SNFResult r = snf(m, SnfRing{p, k}, {});
    // image of (Z/p^k)^t -> (Z/p^k)^rows is  +_j Z/p^{k - min(w_j, k)}
    std::vector<int64_t> out;
    for (size_t j = 0; j < cols.size(); ++j) {
        int w = j < r.col_exponents.size() ? r.col_exponents[j] : k;
        if (w < k) out.push_back(pow_i64(p, k - w));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace lazardlab
