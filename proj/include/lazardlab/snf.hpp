#pragma once

#include <optional>

#include "lazardlab/intmat.hpp"

namespace lazardlab {

// Smith normal form over Z or over Z/p^k. Over Z the pivot strategy is
// minimum absolute value with remainder improvement; over Z/p^k the pivot is
// an entry of minimum p-valuation, whose unit part is invertible, so the
// elimination never meets a zero divisor. Dense up to 512 columns, sparse
// column lists beyond.
struct SnfOptions {
    bool want_u = false;
    bool want_u_inv = false;
    bool want_v = false;
    bool want_v_inv = false;
};

struct SnfRing {
    int64_t p = 0;  // 0 means Z
    int k = 0;
    bool is_z() const { return p == 0; }
    int64_t modulus() const { return pow_i64(p, k); }
};

struct SNFResult {
    // diagonal of U*A*V, length min(rows, cols); divisibility chain d1 | d2 | ...
    // Over Z/p^k every entry is p^j with 0 <= j <= k (p^k recorded explicitly).
    std::vector<int64_t> divisors;
    IntMat u, u_inv, v, v_inv;

    // p-valuations of the diagonal extended to all column indices (entries
    // beyond the diagonal count as "k", i.e. zero); only set over Z/p^k
    std::vector<int> col_exponents;
};

SNFResult snf(const IntMat& a, const SnfRing& ring, const SnfOptions& opts = {});
SNFResult snf_sparse(const SparseMat& a, const SnfRing& ring, const SnfOptions& opts = {});

// ----- derived solvers -----

// basis of {x in Z^cols : A x = 0}, as matrix columns
IntMat kernel_lattice_z(const IntMat& a);

// solve A * Z = T exactly over Z; throws DomainError when unsolvable
IntMat solve_in_lattice_z(const IntMat& a, const IntMat& t);

// Upper-triangular Hermite basis of {x in Z^n : B x = 0 mod p^k}. The lattice
// contains p^k Z^n, so after reduction every entry is bounded by p^k.
IntMat kernel_hnf_mod_pk(const IntMat& b, int64_t p, int k);

// exact solve H z = t for upper-triangular H with nonzero diagonal
IntMat solve_upper_triangular(const IntMat& h, const IntMat& t);

// one solution of A x = b mod p^k, or nullopt
std::optional<IntVec> solve_local(const IntMat& a, const IntVec& b, int64_t p, int k);

// Canonical-form column span over Z/p^k (Howell form): supports canonical
// residues, hence exact membership tests in submodules of (Z/p^k)^rows.
class HowellSpan {
  public:
    HowellSpan(int rows, int64_t p, int k)
        : rows_(rows), p_(p), k_(k), pk_(pow_i64(p, k)) {}

    using Col = std::vector<std::pair<int, int64_t>>;  // sorted by row

    void add(Col c);
    // canonical residue modulo the span; empty means member
    Col reduce(Col c) const;
    int64_t p() const { return p_; }
    int k() const { return k_; }

  private:
    int rows_;
    int64_t p_;
    int k_;
    int64_t pk_;
    std::vector<std::optional<Col>> pivot_;   // by lead row; lead value p^v
    std::vector<int> pivot_val_;              // v at lead row

  public:
    const std::vector<std::optional<Col>>& pivots() const { return pivot_; }
};

// elementary divisors of the submodule of (Z/p^k)^? generated by the given
// columns (e.g. Howell residues); trivial summands dropped
std::vector<int64_t> module_divisors_of_columns(const std::vector<HowellSpan::Col>& cols, int64_t p, int k);

}  // namespace lazardlab
