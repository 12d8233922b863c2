#pragma once

#include "lazardlab/complex.hpp"
#include "lazardlab/lazard_lie.hpp"
#include "lazardlab/wedge.hpp"

namespace lazardlab {

// standard complex of a Lie lattice with coefficients in a module over Z/p^k:
// C^q = Lambda^q (dual) tensor M, with the Koszul convention of WedgeBasis
struct CEComplex {
    LieLattice lattice;
    LieModule module;
    WedgeBasis basis{0, 0};
    ChainComplexInt complex;  // ring = Z/p^k

    int top_degree() const { return lattice.rank; }
    Eigen::Index dim(int q) const { return complex.dims[q]; }
    // flat index of (tuple I, module coordinate t)
    Eigen::Index slot(int q, int tuple_idx, int t) const {
        return static_cast<Eigen::Index>(tuple_idx) * module.rank + t;
    }
};

CEComplex ce_complex(const LieLattice& l, const LieModule& m);

// per-degree elementary divisors + per-degree classification machinery
struct CohomDegree {
    int degree = 0;
    std::vector<int64_t> divisors;  // nontrivial, ascending
    int64_t free_rank = 0;          // count of p^k divisors
    int64_t mod_p_dim = 0;          // independent mod-p dimension
};

struct CohomReport {
    std::string side;  // "lie" or "group"
    int64_t p = 0;
    int k = 0;
    std::string source;
    std::vector<CohomDegree> degrees;
    // group-side stabilization metadata (unused on the Lie side)
    int stabilization_source = -1;
    int stabilization_target = -1;
    bool heuristically_stable = false;
    bool certified = false;
    std::string certified_by;
    // sanity flag: mod_p_dim equals the divisor count in every degree
    bool mod_p_consistent = true;
};

CohomReport cohomology(const CEComplex& c);

// classification of cocycle classes in one degree (kernel mod image + p^k)
QuotientModule ce_classes(const CEComplex& c, int degree);

// wedge cup product for rank-1 trivial coefficients; inputs are cochain
// vectors in the given degrees, output in degree qa + qb
IntVec cup_product(const CEComplex& c, int qa, const IntVec& a, int qb, const IntVec& b);

bool is_cocycle(const CEComplex& c, int degree, const IntVec& z);

}  // namespace lazardlab
