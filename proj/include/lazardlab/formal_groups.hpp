#pragma once

#include "lazardlab/filtered.hpp"
#include "lazardlab/poly.hpp"

namespace lazardlab {

// n-tuple of power series in 2n variables (X block, then Y block) over R,
// truncated at total degree D; defines a group structure on m^n
struct FormalGroupLaw {
    Ring ring;
    int n_vars = 1;
    int degree_cap = 0;
    std::vector<TruncPoly> law;  // law[i] in variables X_0..X_{n-1}, Y_0..Y_{n-1}

    // unit laws exactly, associativity on sampled triples at precision
    void validate(int samples = 50, uint64_t seed = 1) const;
};

FormalGroupLaw additive_law(const Ring& ring, int n_vars, int degree_cap);
FormalGroupLaw multiplicative_law(const Ring& ring, int degree_cap);
// F((a,b),(a',b')) = (a + a', b + b' + a a'): the formal completion of the
// 2-dimensional unipotent matrix group [[1,a,b],[0,1,a],[0,0,1]]
FormalGroupLaw unipotent2_law(const Ring& ring, int degree_cap);

FormalGroupLaw read_fgl(std::istream& is);
void write_fgl(std::ostream& os, const FormalGroupLaw& f);

// points carried as n x 1 matrices with coordinates of valuation >= 1/e
std::vector<PAdicScalar> point_coords(const Elt& x);
Elt make_point(const Ring& ring, const std::vector<PAdicScalar>& coords);

Elt fgl_multiply(const FormalGroupLaw& f, const Elt& x, const Elt& y);
Elt fgl_inverse(const FormalGroupLaw& f, const Elt& x);

struct PPowerDecomposition {
    std::vector<TruncPoly> phi;  // ord >= 2
    std::vector<TruncPoly> psi;  // ord >= p
};

// f_p(X) = p (X + phi(X)) + psi(X) with ord(phi) >= 2 and ord(psi) >= p;
// errors when the split violates these bounds
PPowerDecomposition p_power_decomposition(const FormalGroupLaw& f);

// the standard group restricted to omega >= rho/e, a saturated filtered group
GroupPtr saturation_subgroup(const FormalGroupLaw& f);
// same points restricted to omega >= level/e (level >= rho not enforced when
// diagnostics ask for the full standard group)
GroupPtr standard_group(const FormalGroupLaw& f, int level_pi, bool allow_unsaturated = false);

}  // namespace lazardlab
