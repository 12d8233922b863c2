#include "support/oracles.hpp"

#include <algorithm>
#include <set>
#include <numeric>

namespace lazardlab::oracles {

namespace {

using Grid = std::vector<std::vector<__int128>>;

__int128 iabs(__int128 x) { return x < 0 ? -x : x; }

bool reduce_once(Grid& a, size_t s) {
    const size_t rows = a.size(), cols = a[0].size();
    // locate the minimal nonzero absolute value in the trailing block
    size_t pi = rows, pj = cols;
    for (size_t i = s; i < rows; ++i)
        for (size_t j = s; j < cols; ++j)
            if (a[i][j] != 0 && (pi == rows || iabs(a[i][j]) < iabs(a[pi][pj]))) {
                pi = i;
                pj = j;
            }
    if (pi == rows) return false;
    std::swap(a[pi], a[s]);
    for (size_t i = 0; i < rows; ++i) std::swap(a[i][pj], a[i][s]);
    // one pass of remainder reductions; repeat from scratch until stable
    for (size_t i = s + 1; i < rows; ++i)
        if (a[i][s] != 0) {
            __int128 q = a[i][s] / a[s][s];
            for (size_t j = 0; j < cols; ++j) a[i][j] -= q * a[s][j];
        }
    for (size_t j = s + 1; j < cols; ++j)
        if (a[s][j] != 0) {
            __int128 q = a[s][j] / a[s][s];
            for (size_t i = 0; i < rows; ++i) a[i][j] -= q * a[i][s];
        }
    for (size_t i = s + 1; i < rows; ++i)
        if (a[i][s] != 0) return true;
    for (size_t j = s + 1; j < cols; ++j)
        if (a[s][j] != 0) return true;
    // fold in any row whose entries the pivot does not divide
    for (size_t i = s + 1; i < rows; ++i)
        for (size_t j = s + 1; j < cols; ++j)
            if (a[i][j] % a[s][s] != 0) {
                for (size_t t = 0; t < cols; ++t) a[s][t] += a[i][t];
                return true;
            }
    return false;
}

}  // namespace

std::vector<int64_t> snf_oracle(IntMat in) {
    if (in.rows() > 8 || in.cols() > 8) throw BudgetError("snf_oracle: dimension cap 8x8 exceeded");
    if (in.rows() == 0 || in.cols() == 0) return {};
    Grid a(in.rows(), std::vector<__int128>(in.cols()));
    for (Eigen::Index i = 0; i < in.rows(); ++i)
        for (Eigen::Index j = 0; j < in.cols(); ++j) a[i][j] = in(i, j);
    const size_t nmin = std::min(a.size(), a[0].size());
    for (size_t s = 0; s < nmin; ++s) {
        while (reduce_once(a, s)) {
        }
        if (a[s][s] < 0)
            for (size_t t = 0; t < a[0].size(); ++t) a[s][t] = -a[s][t];
    }
    std::vector<int64_t> d(nmin);
    for (size_t s = 0; s < nmin; ++s) d[s] = static_cast<int64_t>(a[s][s]);
    return d;
}

PAdicScalar scalar_log_series(const PAdicScalar& one_plus_x, int guard_digits) {
    Ring base = one_plus_x.ring();
    Ring big = with_precision(base, base->N + guard_digits);
    PAdicScalar x = (one_plus_x - PAdicScalar(base, 1)).to_ring(big);
    PAdicScalar acc(big);
    PAdicScalar power(big, 1);
    // sum until the partial sums stabilize in the base ring twice in a row
    PAdicScalar prev_base(base);
    int stable = 0;
    for (int m = 1; m <= 4 * big->N + 8 && stable < 2; ++m) {
        power = power * x;
        PAdicScalar term = power.div_exact_int(m % 2 == 0 ? -m : m);
        acc = acc + term;
        PAdicScalar cur = acc.to_ring(base);
        if (m > 1 && cur == prev_base)
            ++stable;
        else
            stable = 0;
        prev_base = cur;
    }
    return prev_base;
}

IntMat random_int_matrix(Rng& rng, int rows, int cols, int64_t bound) {
    std::uniform_int_distribution<int64_t> d(-bound, bound);
    IntMat a(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a(i, j) = d(rng);
    return a;
}

std::vector<int64_t> brute_module_divisors(const IntMat& a, const IntMat& b, int64_t p, int k) {
    const int64_t pk = pow_i64(p, k);
    const int n = static_cast<int>(b.cols() > 0 ? b.cols() : a.rows());
    const int64_t total = pow_i64(pk, n);
    if (total > 600000) throw BudgetError("brute_module_divisors: enumeration too large");

    auto decode = [&](int64_t idx) {
        std::vector<int64_t> x(n);
        for (int i = 0; i < n; ++i) {
            x[i] = idx % pk;
            idx /= pk;
        }
        return x;
    };
    auto in_kernel = [&](const std::vector<int64_t>& x) {
        for (Eigen::Index r = 0; r < b.rows(); ++r) {
            __int128 acc = 0;
            for (int i = 0; i < n; ++i) acc += static_cast<__int128>(b(r, i)) * x[i];
            if (mod_reduce(static_cast<int64_t>(acc % pk), pk) != 0) return false;
        }
        return true;
    };
    // enumerate L = span of A's columns mod p^k as a set of encoded vectors
    std::set<int64_t> lset;
    {
        const int m = static_cast<int>(a.cols());
        const int64_t combos = pow_i64(pk, m);
        if (combos > 600000) throw BudgetError("brute_module_divisors: relation span too large");
        for (int64_t c = 0; c < combos; ++c) {
            int64_t cc = c;
            std::vector<int64_t> lambda(m);
            for (int i = 0; i < m; ++i) {
                lambda[i] = cc % pk;
                cc /= pk;
            }
            int64_t enc = 0;
            for (int i = n - 1; i >= 0; --i) {
                __int128 acc = 0;
                for (int j = 0; j < m; ++j) acc += static_cast<__int128>(a(i, j)) * lambda[j];
                enc = enc * pk + mod_reduce(static_cast<int64_t>(acc % pk), pk);
            }
            lset.insert(enc);
        }
    }
    // N_j = #{classes y in K/L : p^j y = 0} = #{x in K : p^j x in L} / |L|
    std::vector<int64_t> count(k + 1, 0);
    for (int64_t idx = 0; idx < total; ++idx) {
        std::vector<int64_t> x = decode(idx);
        if (!in_kernel(x)) continue;
        for (int j = 0; j <= k; ++j) {
            int64_t pj = pow_i64(p, j);
            int64_t enc = 0;
            for (int i = n - 1; i >= 0; --i) enc = enc * pk + mod_reduce(x[i] * pj, pk);
            if (lset.count(enc)) ++count[j];
        }
    }
    std::vector<int> m_log(k + 1);
    for (int j = 0; j <= k; ++j) {
        int64_t nj = count[j] / static_cast<int64_t>(lset.size());
        m_log[j] = 0;
        while (nj > 1) {
            nj /= p;
            ++m_log[j];
        }
    }
    // m_j - m_{j-1} = #{summands with exponent >= j}
    std::vector<int64_t> divisors;
    for (int j = 1; j <= k; ++j) {
        int at_least_j = m_log[j] - m_log[j - 1];
        int at_least_j1 = j < k ? m_log[j + 1] - m_log[j] : 0;
        for (int c = 0; c < at_least_j - at_least_j1; ++c) divisors.push_back(pow_i64(p, j));
    }
    std::sort(divisors.begin(), divisors.end());
    return divisors;
}

}  // namespace lazardlab::oracles
