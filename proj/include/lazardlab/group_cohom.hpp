#pragma once

#include <memory>

#include "lazardlab/lie_cohom.hpp"
#include "lazardlab/pgroups.hpp"

namespace lazardlab {

// coefficients for the bar complex: a Z/p^k module with the action of the
// ordered-basis generators; trivial when every matrix is the identity
struct BarCoefficients {
    int rank = 1;
    int64_t p = 0;
    int k = 1;
    std::vector<IntMat> rho;  // one per ordered-basis element, mod p^k

    static BarCoefficients trivial(int64_t p, int k, int rank, int generators);
    static BarCoefficients from_group_module(const GroupModule& gm, int k);
    bool is_trivial() const;
};

// normalized inhomogeneous bar cochains on a finite quotient
class BarComplex {
  public:
    BarComplex(std::shared_ptr<const FiniteQuotient> q, BarCoefficients coeffs, int max_degree,
               int64_t assemble_cap = 1 << 21);

    const FiniteQuotient& quotient() const { return *q_; }
    const BarCoefficients& coefficients() const { return coeffs_; }
    int max_degree() const { return max_degree_; }
    int64_t p() const { return coeffs_.p; }
    int k() const { return coeffs_.k; }

    // dim C^n = (|Q| - 1)^n * rank(M)
    int64_t dim(int n) const;
    // flat slot of (tuple of non-identity element indices, module coordinate)
    int64_t slot(const std::vector<int>& tuple, int coord) const;
    // differential d_n : C^n -> C^{n+1}, assembled sparse; d.d = 0 is verified
    // for consecutive calls via validate_square()
    SparseMat differential(int n) const;
    void validate_square(int n) const;  // d_{n+1} . d_n = 0 exactly

    // action of the element with the given index, composed along the BFS chain
    const IntMat& action(int elt) const { return rho_elt_[elt]; }

  private:
    std::shared_ptr<const FiniteQuotient> q_;
    BarCoefficients coeffs_;
    int max_degree_;
    int64_t cap_;
    std::vector<IntMat> rho_elt_;
};

// pullback of a degree-n cochain along the canonical surjection big -> small
IntVec inflate_cochain(const BarComplex& small, const BarComplex& big, int degree, const IntVec& f);

// H^degree of one finite quotient, with classification machinery
QuotientModule bar_classes(const BarComplex& bc, int degree);

// Alexander-Whitney cup product for rank-1 coefficients
IntVec group_cup(const BarComplex& bc, int qa, const IntVec& a, int qb, const IntVec& b);

struct StabilizationBudget {
    int64_t quotient_cap = 19683;       // 3^9
    int64_t mult_table_cap = 1 << 22;
    int64_t source_rows_cap = 1 << 21;  // entries of C^{degree+1} at a source level
    int64_t source_cols_cap = 2048;     // columns handled by the dense-V sparse SNF
    int64_t target_rows_cap = 1 << 23;  // entries of C^{degree} at a target level
    int64_t target_cols_cap = 8192;     // columns of the coboundary span at a target
    int max_level = 9;
};

// continuous cohomology by stabilized inflation images across quotient levels
CohomReport continuous_cohomology(const GroupPtr& g, const BarCoefficients& coeffs, int max_degree,
                                  const StabilizationBudget& budget = {});

// criterion helper: the cup products of the stabilized degree-1 classes span
// an exterior square of the expected rank inside the stabilized H^2 image
bool exterior_squares_realized(const GroupPtr& g, int k, const StabilizationBudget& budget = {});

}  // namespace lazardlab
