#pragma once

#include "lazardlab/filtered.hpp"
#include "lazardlab/snf.hpp"

namespace lazardlab {

// Finite free Z_p-lattice with structure constants in the frame of the
// logarithms of an ordered basis. Constants are exact integers when
// prec_exp == 0, otherwise canonical residues mod p^prec_exp.
struct LieLattice {
    int rank = 0;
    int64_t p = 0;
    int prec_exp = 0;
    std::vector<int64_t> constants;  // c[(i*rank + j)*rank + k] = c_{ij}^k
    std::vector<Rat> basis_valuations;
    std::string provenance;

    int64_t c(int i, int j, int k) const { return constants[(i * rank + j) * rank + k]; }
    void set_c(int i, int j, int k, int64_t v) { constants[(i * rank + j) * rank + k] = v; }
    int64_t modulus() const { return prec_exp > 0 ? pow_i64(p, prec_exp) : 0; }

    // antisymmetry and the Jacobi identity, exact mod p^prec_exp (or over Z)
    void validate() const;
    // c_{ij}^k reduced mod p^k_target, canonical representatives
    std::vector<int64_t> constants_mod(int k_target) const;
    // matrix of ad(delta_i) on the basis, entries (k, j) = c_{ij}^k mod p^k_target
    IntMat ad_matrix(int i, int k_target) const;
};

LieLattice read_lattice(std::istream& is);
void write_lattice(std::ostream& os, const LieLattice& l);

// the integral Lazard Lie algebra of a matrix group: logarithms of the
// ordered basis with structure constants solved at precision
LieLattice lazard_lie(const GroupPtr& g);

struct LatticeIdentityVerdict {
    bool equal = false;
    std::string witness;
};

// compare lazard_lie(1 + p^a M_n(Z_p)) with p^a * gl_n(Z_p) at precision
LatticeIdentityVerdict check_lattice_identity(const GroupPtr& g);

// coefficient module: rank m over Z/p^k with one action matrix per Lie basis
// vector, satisfying [X,Y] v = X(Yv) - Y(Xv) exactly
struct LieModule {
    int rank = 0;
    int64_t p = 0;
    int k = 0;
    std::vector<IntMat> actions;  // one m x m matrix mod p^k per lattice basis vector
    bool trivial() const {
        for (const IntMat& a : actions)
            if (!a.isZero()) return false;
        return true;
    }
};

LieModule trivial_module(const LieLattice& l, int rank, int k);

// group-side coefficient data: generator action matrices in 1 + p End(M)
struct GroupModule {
    int rank = 0;
    int64_t p = 0;
    int prec_exp = 0;            // matrices are exact mod p^prec_exp
    std::vector<IntMat> rho;     // one per ordered-basis element
};

// log of 1 + B over Z/p^k for v_p(B) >= 1; returns the matrix and the
// exponent of the modulus it is trustworthy at
std::pair<IntMat, int> int_matrix_log_one_plus(const IntMat& b, int64_t p, int k_in);

// Lie-module structure induced by delta_i = log rho(x_i); verifies the image
// condition rho(x_i) in 1 + p End(M) and bracket compatibility mod p^k
LieModule induced_module(const LieLattice& l, const GroupModule& m, int k);

// adjoint action of the group on its own Lazard lattice, as a GroupModule
GroupModule adjoint_module(const GroupPtr& g, const LieLattice& l);

// graded comparison gr(L*) = gr(G): valuation multisets and per-degree
// dimensions over the window [omega_min, up_to]
bool gr_lattice_matches_group(const LieLattice& l, const GroupPtr& g, Rat up_to,
                              std::string* detail = nullptr);

}  // namespace lazardlab
