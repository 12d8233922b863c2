#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>

#include "lazardlab/intmat.hpp"
#include "lazardlab/padic_matrix.hpp"

namespace lazardlab {

// A group element is always carried as a matrix at working precision; formal
// group points ride along as n x 1 column matrices.
using Elt = PAdicMatrix;

struct OrderedBasis {
    std::vector<Elt> elements;
    std::vector<Rat> valuations;  // non-decreasing
    bool equi_p_valued = false;
};

// A concrete group-with-filtration handle. omega() returning nullopt means the
// element is indistinguishable from the identity at working precision.
class FilteredGroup {
  public:
    virtual ~FilteredGroup() = default;

    virtual const Ring& ring() const = 0;
    virtual Elt identity() const = 0;
    virtual Elt mul(const Elt& a, const Elt& b) const = 0;
    virtual Elt inv(const Elt& a) const = 0;
    virtual std::optional<Rat> omega(const Elt& a) const = 0;
    virtual bool contains(const Elt& a) const = 0;
    virtual Elt random_element(Rng& rng) const = 0;
    // random element with omega >= nu (identity when empty at precision)
    virtual Elt random_element_deep(Rng& rng, Rat nu) const = 0;
    virtual OrderedBasis ordered_basis() const = 0;
    // group generators of the filtration subgroup G_{omega >= nu}
    virtual std::vector<Elt> filtration_generators(Rat nu) const = 0;
    // canonical key of the image in G / G_{omega >= level}
    virtual std::vector<int64_t> key(const Elt& a, Rat level) const = 0;
    // solve y^p = x inside the group; nullopt when unavailable or unsolvable
    virtual std::optional<Elt> p_th_root(const Elt& x) const { return std::nullopt; }
    // logarithm/exponential adapted to the group's valuation; the defaults are
    // the matrix series, which require omega(x-1) > 1/(p-1) entrywise
    virtual Elt log_element(const Elt& x) const;
    virtual Elt exp_element(const Elt& x) const;
    virtual bool complete_by_construction() const { return true; }
    // least possible omega value on the group
    virtual Rat omega_min() const = 0;
    // denominator of the omega value group (1/e by default; fixtures may refine)
    virtual int omega_den() const { return ring()->e; }
    virtual std::string describe() const = 0;

    int64_t p() const { return ring()->p; }
    Elt pow(const Elt& a, int64_t n) const;
    Elt p_power(const Elt& a) const { return pow(a, p()); }
    Elt commutator(const Elt& a, const Elt& b) const { return mul(mul(inv(a), inv(b)), mul(a, b)); }
};

using GroupPtr = std::shared_ptr<const FilteredGroup>;

enum class AxiomStatus { Holds, Fails, NotApplicable, HoldsByConstruction };

struct AxiomVerdict {
    AxiomStatus status = AxiomStatus::NotApplicable;
    std::string witness;      // reproducible description on failure
    int checked = 0;          // decided samples
    int undecided = 0;        // bounds beyond precision, reported not passed
};

struct FiltrationReport {
    std::map<std::string, AxiomVerdict> axioms;  // keys "1".."7" and "p-filtered"
    int sample_size = 0;
    std::set<Rat> value_set;  // observed omega values
    bool all_pass() const {
        for (auto& [k, v] : axioms)
            if (v.status == AxiomStatus::Fails) return false;
        return true;
    }
};

FiltrationReport check_filtration(const FilteredGroup& g, int samples, uint64_t seed);

struct GradedPiece {
    Rat nu;
    int dim = 0;              // dim_Fp of G_nu / G_nu^+
    std::vector<Elt> basis;   // coset representatives of an F_p-basis
    IntMat eps_action;        // x -> x^p into the next piece, dim(next) x dim
};

// graded pieces for nu = omega_min, omega_min + 1/e, ..., up to the bound;
// enumeration capped at `cap` cosets per piece
std::vector<GradedPiece> graded_pieces(const FilteredGroup& g, Rat up_to, int64_t cap = 19683);

// representatives freely generating gr(G) over F_p[eps], found by enumerating
// the fundamental window [omega_min, omega_min + 1)
OrderedBasis find_ordered_basis(const FilteredGroup& g);

// rank of gr(G) as a free F_p[eps]-module (= sum of window dimensions)
int group_rank(const FilteredGroup& g);

struct FilteredFreeModule {
    int rank = 0;
    std::vector<Rat> generator_valuations;
    std::string base_ring_tag;  // bookkeeping only: "A" (group side) or "B" (Lie side)
};

struct SaturationResult {
    FilteredFreeModule module;
    std::vector<int64_t> rescale_exponents;  // e * w(e_i)
};

SaturationResult saturate_filtered_free(const FilteredFreeModule& m, int ramification);

Rat groupring_valuation(const std::vector<int64_t>& alpha, const OrderedBasis& basis);

// test/diagnostic decorators
GroupPtr with_omega_shift(GroupPtr g, Rat shift);   // omega' = omega + shift
GroupPtr with_omega_scaled(GroupPtr g, int64_t factor);

}  // namespace lazardlab
