#pragma once

#include "lazardlab/snf.hpp"

namespace lazardlab {

// finite complex of free modules over Z or Z/p^k, given by differential
// matrices d_q : C^q -> C^{q+1} (rows = dim C^{q+1}); homology = elementary
// divisors per degree
struct ChainComplexInt {
    SnfRing ring;                // Z when ring.p == 0
    std::vector<Eigen::Index> dims;   // dim C^q, q = 0..top
    std::vector<IntMat> diff;    // diff[q] : C^q -> C^{q+1}, size top (may be empty matrices)

    int top_degree() const { return static_cast<int>(dims.size()) - 1; }
    const IntMat& d(int q) const { return diff[q]; }

    // throws with the offending entry when d(q+1) * d(q) != 0
    void validate() const;
};

struct DegreeDivisors {
    int degree = 0;
    std::vector<int64_t> divisors;  // nontrivial elementary divisors, ascending
    int64_t mod_p_dim = 0;          // independent mod-p computation
};

// H^q(C) for a complex over Z/p^k, by lifting the differentials to Z and
// running integer SNF on the block construction [B | p^k I] / [A | p^k I]
std::vector<int64_t> homology_block_z(const IntMat& a, const IntMat& b, int64_t p, int k);

// same module, computed p-locally at working modulus p^{2k}; used for the
// large sparse complexes and as an independent route on the small ones
std::vector<int64_t> homology_local(const SparseMat& a, const SparseMat& b, int64_t p, int k);

// Presentation of H = ker(B mod p^k) / (im(A mod p^k) + p^k) with explicit
// generator vectors and coordinates, for cup products and inflation tracking.
class QuotientModule {
  public:
    QuotientModule(const SparseMat& a, const SparseMat& b, int64_t p, int k);

    const std::vector<int64_t>& divisors() const { return divisors_; }
    // one generating cocycle per nontrivial divisor, entries mod p^k
    const std::vector<IntVec>& generators() const { return generators_; }

    // coordinates of a cocycle's class: one residue mod each divisor;
    // nullopt when the vector is not in ker(B mod p^k)
    std::optional<std::vector<int64_t>> classify(const IntVec& z) const;
    bool is_trivial_class(const IntVec& z) const;

    int64_t p() const { return p_; }
    int k() const { return k_; }
    Eigen::Index ambient_dim() const { return n_; }

  private:
    int64_t p_;
    int k_;
    int64_t pk_, pk2_;
    Eigen::Index n_;
    IntMat kernel_basis_;       // columns, mod p^{2k}
    IntMat v_inv_;              // from the kernel SNF, mod p^{2k}
    std::vector<int> kexp_;     // kernel scaling exponents a_j = k - min(w_j, k)
    IntMat u2_, u2_inv_;        // from the presentation SNF, mod p^k
    std::vector<int> w2_;       // presentation divisor exponents per coordinate
    std::vector<int64_t> divisors_;
    std::vector<int> divisor_slot_;  // coordinate slot of each reported divisor
    std::vector<IntVec> generators_;
};

std::vector<DegreeDivisors> cohomology_of_complex(const ChainComplexInt& c);

}  // namespace lazardlab
