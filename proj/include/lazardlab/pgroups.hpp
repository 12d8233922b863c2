#pragma once

#include <unordered_map>

#include "lazardlab/filtered.hpp"

namespace lazardlab {

enum class Shape { Full, UnipotentUpper, Diagonal };

enum class FiltrationKind {
    PiAdic,  // omega(1+X) = min entry valuation, in (1/e)Z
    Weil     // omega'(1+X) = min p-valuation of the Z_p-coordinates of X
};

struct MatrixGroupSpec {
    int64_t p = 3;
    int e = 1;
    std::vector<int64_t> eisenstein_poly;  // empty: canonical (x - p for e = 1)
    int n = 1;
    int level = 1;  // pi-units for PiAdic, p-units for Weil
    Shape shape = Shape::Full;
    FiltrationKind filtration = FiltrationKind::PiAdic;
    std::string fixture_tag;  // "quaternion-units" selects the division-algebra model
    int precision_N = 6;
    // admit level < rho: the group is still filtered, but not p-valued; used
    // only for diagnostic fixtures such as 1 + 2 Z_2
    bool allow_unsaturated = false;
};

MatrixGroupSpec parse_group_spec(std::istream& is);
void write_group_spec(std::ostream& os, const MatrixGroupSpec& spec);

GroupPtr build_group(const MatrixGroupSpec& spec);

// standard maximal-order presentation of the quaternion units 1 + Pi*O as
// 4 x 4 matrices over Z_p through the left regular representation
GroupPtr build_quaternion_units(int64_t p, int precision_N);

// G / G_{omega >= m} as an explicit finite p-group
class FiniteQuotient {
  public:
    FiniteQuotient(GroupPtr g, int level, int64_t order_cap = 19683,
                   int64_t mult_table_cap = 1 << 22);

    int64_t order() const { return static_cast<int64_t>(reps_.size()); }
    int level() const { return level_; }
    const GroupPtr& group() const { return group_; }
    int id() const { return 0; }
    int mul(int a, int b) const;
    int inv(int a) const;
    int pow(int a, int64_t n) const;
    const Elt& rep(int i) const { return reps_[i]; }
    const std::vector<int>& generators() const { return gen_idx_; }
    // parent/generator chain: element i equals rep(parent) * generator(gen)
    int bfs_parent(int i) const { return parent_[i]; }
    int bfs_gen(int i) const { return gen_of_[i]; }

    int index_of(const Elt& e) const;  // -1 when the image is not in the quotient
    // canonical surjection from a finer quotient of the same group
    int project_from(const FiniteQuotient& finer, int idx) const;

  private:
    GroupPtr group_;
    int level_;
    std::vector<Elt> reps_;
    std::map<std::vector<int64_t>, int> index_;
    std::vector<int> inv_;
    std::vector<int> parent_, gen_of_;
    std::vector<int> gen_idx_;
    std::vector<int32_t> table_;  // order x order when within cap, else empty
};

struct LowerPSeries {
    // indices [G_i : G_{i+1}] for i = 1..depth, each a p-power
    std::vector<int64_t> indices;
    // whether the image of G_{i+1} coincides with the omega-filtration subgroup
    // at level t + i (t = largest ordered-basis valuation)
    std::vector<bool> omega_jumps_match;
    std::vector<bool> normal_in_quotient;
};

LowerPSeries lower_p_series(const GroupPtr& g, int depth);

struct UniformityVerdict {
    bool finitely_generated = false;
    bool power_quotient_abelian = false;
    bool indices_constant = false;
    std::vector<int64_t> indices;
    std::string detail;
    bool uniform() const { return finitely_generated && power_quotient_abelian && indices_constant; }
};

UniformityVerdict check_uniform(const GroupPtr& g, int depth);

// omega' = omega + 1 - t for an equi-p-valued saturated group with common
// basis valuation t; p = 2 unsupported
GroupPtr renormalize_valuation(const GroupPtr& g);

}  // namespace lazardlab
