#include "lazardlab/padic_matrix.hpp"

namespace lazardlab {

namespace {

// Terms of log/exp with index beyond the returned bound vanish mod pi^N.
// Both vp(m) and vp(m!) are at most (m-1)/(p-1), so the term valuation is at
// least m*vx - e*(m-1)/(p-1) >= m*(vx - e/(p-1)), and the convergence
// condition vx*(p-1) > e makes the slope positive. Lazard's quantitative
// convergence bound, made integral.
struct SeriesPlan {
    int last_term;
    int pad;  // pi-digits of headroom so every exact division stays decidable
};

SeriesPlan plan_series(const RingSpec& R, int vx, bool factorial) {
    int64_t slope_num = static_cast<int64_t>(vx) * (R.p - 1) - R.e;  // > 0
    int64_t bound = (static_cast<int64_t>(R.N) * (R.p - 1) + slope_num - 1) / slope_num;
    int64_t vfact = 0;
    int maxv = 0;
    for (int64_t m = 1; m <= bound; ++m) {
        int v = vp(m, R.p);
        vfact += v;
        maxv = static_cast<int>(std::max<int64_t>(maxv, factorial ? vfact : v));
    }
    return {static_cast<int>(bound), R.e * maxv};
}

}  // namespace

PAdicMatrix one_unit_inverse(const PAdicMatrix& a) {
    // geometric series for (1 + X)^{-1}; converges whenever the powers of X
    // vanish at precision (topologically nilpotent X), which covers both the
    // congruence lattices and the quaternion regular representation
    const Ring& ring = a.ring();
    int n = a.rows();
    PAdicMatrix x = PAdicMatrix::identity(ring, n) - a;
    PAdicMatrix acc = PAdicMatrix::identity(ring, n);
    PAdicMatrix term = PAdicMatrix::identity(ring, n);
    for (int m = 1; m <= 4 * ring->N + 4; ++m) {
        term = term * x;
        if (term.is_zero()) {
            if ((a * acc) != PAdicMatrix::identity(ring, n))
                throw DomainError("one_unit_inverse: series did not invert the input");
            return acc;
        }
        acc = acc + term;
    }
    throw DomainError("one_unit_inverse: input is not topologically unipotent at precision");
}

PAdicMatrix matrix_log(const PAdicMatrix& a) {
    const Ring& ring = a.ring();
    const RingSpec& R = *ring;
    if (a.rows() != a.cols()) throw DomainError("matrix_log: square matrix required");
    PAdicMatrix x = a - PAdicMatrix::identity(ring, a.rows());
    int vx = x.omega_pi();
    if (vx >= R.N) return PAdicMatrix(ring, a.rows(), a.cols());
    if (static_cast<int64_t>(vx) * (R.p - 1) <= R.e)
        throw DomainError("matrix_log: omega(A-1) = " + Rat(vx, R.e).str() +
                          " is not > 1/(p-1); series diverges");

    SeriesPlan plan = plan_series(R, vx, /*factorial=*/false);
    Ring pad = with_precision(ring, R.N + plan.pad);
    PAdicMatrix xp = x.to_ring(pad);
    PAdicMatrix acc(pad, a.rows(), a.cols());
    PAdicMatrix pw = xp;
    for (int m = 1; m <= plan.last_term; ++m) {
        if (m > 1) pw = pw * xp;
        PAdicMatrix term = pw.div_exact_int(m);
        acc = (m % 2 == 1) ? acc + term : acc - term;
    }
    return acc.to_ring(ring);
}

PAdicMatrix matrix_exp(const PAdicMatrix& xin) {
    const Ring& ring = xin.ring();
    const RingSpec& R = *ring;
    if (xin.rows() != xin.cols()) throw DomainError("matrix_exp: square matrix required");
    int vx = xin.omega_pi();
    if (vx >= R.N) return PAdicMatrix::identity(ring, xin.rows());
    if (static_cast<int64_t>(vx) * (R.p - 1) <= R.e)
        throw DomainError("matrix_exp: omega(X) = " + Rat(vx, R.e).str() +
                          " is not > 1/(p-1); series diverges");

    SeriesPlan plan = plan_series(R, vx, /*factorial=*/true);
    Ring pad = with_precision(ring, R.N + plan.pad);
    PAdicMatrix xp = xin.to_ring(pad);
    PAdicMatrix acc = PAdicMatrix::identity(pad, xin.rows());
    PAdicMatrix pw = PAdicMatrix::identity(pad, xin.rows());
    for (int m = 1; m <= plan.last_term; ++m) {
        pw = (pw * xp).div_exact_int(m);  // pw = X^m / m!
        acc = acc + pw;
    }
    return acc.to_ring(ring);
}

}  // namespace lazardlab
