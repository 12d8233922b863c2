#include "lazardlab/filtered.hpp"

#include "lazardlab/padic_matrix.hpp"

#include <algorithm>
#include <sstream>

namespace lazardlab {

Elt FilteredGroup::log_element(const Elt& x) const { return matrix_log(x); }
Elt FilteredGroup::exp_element(const Elt& x) const { return matrix_exp(x); }

Elt FilteredGroup::pow(const Elt& a, int64_t n) const {
    if (n < 0) return pow(inv(a), -n);
    Elt acc = identity();
    Elt base = a;
    while (n > 0) {
        if (n & 1) acc = mul(acc, base);
        base = mul(base, base);
        n >>= 1;
    }
    return acc;
}

namespace {

enum class Cmp { Yes, No, Undecidable };

// decide omega(z) >= bound at working precision; precision_limit = N/e
Cmp at_least(const std::optional<Rat>& oz, Rat bound, Rat precision_limit) {
    if (bound > precision_limit) {
        // can only refute: a finite omega below the precision limit refutes
        if (oz) return Cmp::No;
        return Cmp::Undecidable;
    }
    if (!oz) return Cmp::Yes;  // bottom means >= precision limit >= bound
    return *oz >= bound ? Cmp::Yes : Cmp::No;
}

std::string describe_elt(const Elt& e) {
    std::ostringstream os;
    os << e.str();
    return os.str();
}

void tally(AxiomVerdict& v, Cmp c, const std::string& witness) {
    if (c == Cmp::Yes) {
        ++v.checked;
        if (v.status == AxiomStatus::NotApplicable) v.status = AxiomStatus::Holds;
    } else if (c == Cmp::Undecidable) {
        ++v.undecided;
    } else {
        v.status = AxiomStatus::Fails;
        if (v.witness.empty()) v.witness = witness;
    }
}

}  // namespace

FiltrationReport check_filtration(const FilteredGroup& g, int samples, uint64_t seed) {
    FiltrationReport rep;
    Rng rng(seed);
    const Rat prec_limit(g.ring()->N, g.ring()->e);
    const int den = g.omega_den();
    const int64_t p = g.p();

    auto omega_or_limit = [&](const Elt& x) -> Rat {
        auto o = g.omega(x);
        return o ? *o : prec_limit;
    };

    std::vector<Elt> pool;
    for (int t = 0; t < samples; ++t) pool.push_back(g.random_element(rng));
    OrderedBasis basis = g.ordered_basis();
    // exhaustive additions for axioms 5/6: basis elements and pairwise products
    std::vector<Elt> exhaustive = basis.elements;
    for (size_t i = 0; i < basis.elements.size(); ++i)
        for (size_t j = i; j < basis.elements.size(); ++j)
            exhaustive.push_back(g.mul(basis.elements[i], basis.elements[j]));

    rep.sample_size = static_cast<int>(pool.size());
    for (const Elt& x : pool)
        if (auto o = g.omega(x)) rep.value_set.insert(*o);

    AxiomVerdict& a1 = rep.axioms["1"];
    AxiomVerdict& a2 = rep.axioms["2"];
    AxiomVerdict& apf = rep.axioms["p-filtered"];
    AxiomVerdict& a3 = rep.axioms["3"];
    AxiomVerdict& a4 = rep.axioms["4"];
    AxiomVerdict& a5 = rep.axioms["5"];
    AxiomVerdict& a6 = rep.axioms["6"];
    AxiomVerdict& a7 = rep.axioms["7"];

    for (size_t t = 0; t + 1 < pool.size(); t += 2) {
        const Elt& x = pool[t];
        const Elt& y = pool[t + 1];
        Rat ox = omega_or_limit(x), oy = omega_or_limit(y);
        tally(a1, at_least(g.omega(g.mul(x, g.inv(y))), std::min(ox, oy), prec_limit),
              "axiom 1 at x=" + describe_elt(x) + ", y=" + describe_elt(y));
        tally(a2, at_least(g.omega(g.commutator(x, y)), ox + oy, prec_limit),
              "axiom 2 at x=" + describe_elt(x) + ", y=" + describe_elt(y));
    }

    auto check_power_axioms = [&](const Elt& x) {
        auto ox = g.omega(x);
        if (!ox) return;  // elements at the bottom are excluded from power axioms
        Elt xp = g.pow(x, p);
        auto oxp = g.omega(xp);
        Rat bound = std::min(*ox + Rat(1, 1), Rat(p, 1) * *ox);
        tally(apf, at_least(oxp, bound, prec_limit), "p-filtered at x=" + describe_elt(x));
        Rat target = *ox + Rat(1, 1);  // axiom 5 is the equality omega(x^p) = omega(x) + 1
        Cmp lower = at_least(oxp, target, prec_limit);
        if (lower != Cmp::Yes) {
            tally(a5, lower, "axiom 5 (power valuation too small) at x=" + describe_elt(x));
            return;
        }
        if (oxp && *oxp == target) {
            tally(a5, Cmp::Yes, "");
        } else if (target < prec_limit) {
            tally(a5, Cmp::No, "axiom 5 (power valuation too large) at x=" + describe_elt(x));
        } else {
            tally(a5, Cmp::Undecidable, "");
        }
    };

    for (const Elt& x : pool) check_power_axioms(x);
    for (const Elt& x : exhaustive) check_power_axioms(x);

    // axiom 3: sampled non-identity elements have finite omega; elements at the
    // bottom are indistinguishable from the identity at this precision
    for (const Elt& x : pool)
        if (g.omega(x)) ++a3.checked;
    if (a3.status == AxiomStatus::NotApplicable) a3.status = AxiomStatus::Holds;

    // axiom 4: omega > 1/(p-1), decided exactly on the group's minimum value
    {
        Rat min_omega = g.omega_min();
        bool ok = min_omega * Rat(p - 1, 1) > Rat(1, 1);
        a4.status = ok ? AxiomStatus::Holds : AxiomStatus::Fails;
        a4.checked = 1;
        if (!ok) a4.witness = "omega_min = " + min_omega.str() + " <= 1/(p-1)";
    }

    // axiom 6: p-divisibility above 1 + 1/(p-1), via constructive roots
    {
        Rat threshold = Rat(1, 1) + Rat(1, p - 1);
        std::vector<Elt> deep;
        for (const Elt& x : pool) {
            auto o = g.omega(x);
            if (o && *o > threshold) deep.push_back(x);
        }
        for (const Elt& x : exhaustive) {
            auto o = g.omega(x);
            if (o && *o > threshold) deep.push_back(x);
        }
        Rat nu = threshold + Rat(1, den);
        if (nu < prec_limit)
            for (int t = 0; t < std::max(4, samples / 8); ++t) {
                Elt x = g.random_element_deep(rng, nu);
                if (g.omega(x)) deep.push_back(x);
            }
        for (const Elt& x : deep) {
            auto y = g.p_th_root(x);
            if (!y) {
                ++a6.undecided;  // no constructive solver for this group
                continue;
            }
            if (g.contains(*y))
                tally(a6, Cmp::Yes, "");
            else
                tally(a6, Cmp::No, "axiom 6: p-th root escapes the group at x=" + describe_elt(x));
        }
        if (a6.status == AxiomStatus::NotApplicable && a6.undecided == 0 && deep.empty())
            a6.status = AxiomStatus::Holds;  // nothing above the threshold at this precision
    }

    a7.status = g.complete_by_construction() ? AxiomStatus::HoldsByConstruction : AxiomStatus::NotApplicable;
    return rep;
}

std::vector<GradedPiece> graded_pieces(const FilteredGroup& g, Rat up_to, int64_t cap) {
    const int e = g.omega_den();
    const int64_t p = g.p();
    Rat step(1, e);

    struct PieceData {
        GradedPiece piece;
        std::map<std::vector<int64_t>, std::vector<int64_t>> coords;  // key -> Fp coordinates
    };

    auto enumerate_piece = [&](Rat nu) -> PieceData {
        PieceData data;
        data.piece.nu = nu;
        Rat next = nu + step;
        std::vector<Elt> gens = g.filtration_generators(nu);
        std::map<std::vector<int64_t>, std::vector<int64_t>> table;
        table[g.key(g.identity(), next)] = {};
        for (const Elt& cand : gens) {
            if (table.count(g.key(cand, next))) continue;
            std::vector<Elt> chosen = data.piece.basis;
            chosen.push_back(cand);
            // rebuild the coset table over the enlarged generating set
            std::map<std::vector<int64_t>, std::vector<int64_t>> bigger;
            std::vector<int64_t> counter(chosen.size(), 0);
            while (true) {
                Elt prod = g.identity();
                for (size_t i = 0; i < chosen.size(); ++i)
                    if (counter[i]) prod = g.mul(prod, g.pow(chosen[i], counter[i]));
                bigger[g.key(prod, next)] = counter;
                if (static_cast<int64_t>(bigger.size()) > cap)
                    throw BudgetError("graded_pieces: enumeration cap exceeded");
                size_t pos = 0;
                while (pos < counter.size() && ++counter[pos] == p) counter[pos++] = 0;
                if (pos == counter.size()) break;
            }
            if (bigger.size() == table.size() * p) {
                table = std::move(bigger);
                data.piece.basis.push_back(cand);
            }
        }
        data.piece.dim = static_cast<int>(data.piece.basis.size());
        data.coords = std::move(table);
        return data;
    };

    const Rat prec_limit(g.ring()->N, g.ring()->e);
    if (up_to + step > prec_limit)
        throw PrecisionError("graded_pieces: requested degree " + up_to.str() +
                             " is not separated at precision " + prec_limit.str());
    // enumerate pieces through up_to + 1 so each piece can see the target of
    // its eps action (x -> x^p raises the degree by exactly 1)
    std::vector<PieceData> pieces;
    std::vector<Rat> degrees;
    for (Rat nu = g.omega_min(); nu <= up_to + Rat(1, 1) && nu + step <= prec_limit; nu = nu + step) {
        pieces.push_back(enumerate_piece(nu));
        degrees.push_back(nu);
    }
    std::vector<GradedPiece> out;
    for (size_t t = 0; t < pieces.size(); ++t) {
        if (degrees[t] > up_to) break;
        GradedPiece piece = pieces[t].piece;
        size_t target = t + static_cast<size_t>(e);  // nu + 1
        if (target < pieces.size()) {
            const PieceData& nxt = pieces[target];
            piece.eps_action = IntMat::Zero(nxt.piece.dim, piece.dim);
            for (int j = 0; j < piece.dim; ++j) {
                Elt xp = g.p_power(piece.basis[j]);
                auto it = nxt.coords.find(g.key(xp, degrees[target] + step));
                if (it == nxt.coords.end())
                    throw DomainError("graded_pieces: p-power escapes the expected graded piece");
                for (size_t i = 0; i < it->second.size(); ++i) piece.eps_action(i, j) = it->second[i];
            }
        }
        out.push_back(std::move(piece));
    }
    return out;
}

OrderedBasis find_ordered_basis(const FilteredGroup& g) {
    // representatives from the fundamental window [omega_min, omega_min + 1)
    const int e = g.omega_den();
    Rat lo = g.omega_min();
    Rat hi = lo + Rat(e - 1, e);
    auto pieces = graded_pieces(g, hi);
    OrderedBasis basis;
    for (const auto& piece : pieces) {
        if (piece.nu > hi) continue;
        for (const Elt& x : piece.basis) {
            basis.elements.push_back(x);
            basis.valuations.push_back(piece.nu);
        }
    }
    if (basis.elements.empty()) throw DomainError("find_ordered_basis: trivial group at precision");
    basis.equi_p_valued = std::all_of(basis.valuations.begin(), basis.valuations.end(),
                                      [&](const Rat& r) { return r == basis.valuations.front(); });
    return basis;
}

int group_rank(const FilteredGroup& g) { return static_cast<int>(find_ordered_basis(g).elements.size()); }

SaturationResult saturate_filtered_free(const FilteredFreeModule& m, int ramification) {
    SaturationResult r;
    r.module.rank = m.rank;
    r.module.base_ring_tag = m.base_ring_tag;
    for (const Rat& w : m.generator_valuations) {
        Rat scaled = w * Rat(ramification, 1);
        if (scaled.den != 1) throw DomainError("saturate_filtered_free: valuation not in (1/e)Z");
        r.rescale_exponents.push_back(scaled.num);
        r.module.generator_valuations.push_back(Rat(0, 1));
    }
    return r;
}

Rat groupring_valuation(const std::vector<int64_t>& alpha, const OrderedBasis& basis) {
    if (alpha.size() != basis.valuations.size())
        throw DomainError("groupring_valuation: index length mismatch");
    Rat acc(0, 1);
    for (size_t i = 0; i < alpha.size(); ++i) acc = acc + Rat(alpha[i], 1) * basis.valuations[i];
    return acc;
}

namespace {

class OmegaShiftGroup : public FilteredGroup {
  public:
    OmegaShiftGroup(GroupPtr base, Rat shift) : base_(std::move(base)), shift_(shift) {}
    const Ring& ring() const override { return base_->ring(); }
    Elt identity() const override { return base_->identity(); }
    Elt mul(const Elt& a, const Elt& b) const override { return base_->mul(a, b); }
    Elt inv(const Elt& a) const override { return base_->inv(a); }
    std::optional<Rat> omega(const Elt& a) const override {
        auto o = base_->omega(a);
        if (!o) return std::nullopt;
        return *o + shift_;
    }
    bool contains(const Elt& a) const override { return base_->contains(a); }
    Elt random_element(Rng& rng) const override { return base_->random_element(rng); }
    Elt random_element_deep(Rng& rng, Rat nu) const override {
        return base_->random_element_deep(rng, nu - shift_);
    }
    OrderedBasis ordered_basis() const override {
        OrderedBasis b = base_->ordered_basis();
        for (auto& v : b.valuations) v = v + shift_;
        return b;
    }
    std::vector<Elt> filtration_generators(Rat nu) const override {
        return base_->filtration_generators(nu - shift_);
    }
    std::vector<int64_t> key(const Elt& a, Rat level) const override {
        return base_->key(a, level - shift_);
    }
    std::optional<Elt> p_th_root(const Elt& x) const override { return base_->p_th_root(x); }
    bool complete_by_construction() const override { return base_->complete_by_construction(); }
    int omega_den() const override { return base_->omega_den(); }
    Rat omega_min() const override { return base_->omega_min() + shift_; }
    std::string describe() const override {
        return base_->describe() + " with omega shifted by " + shift_.str();
    }

  private:
    GroupPtr base_;
    Rat shift_;
};

class OmegaScaleGroup : public FilteredGroup {
  public:
    OmegaScaleGroup(GroupPtr base, int64_t factor) : base_(std::move(base)), f_(factor) {}
    const Ring& ring() const override { return base_->ring(); }
    Elt identity() const override { return base_->identity(); }
    Elt mul(const Elt& a, const Elt& b) const override { return base_->mul(a, b); }
    Elt inv(const Elt& a) const override { return base_->inv(a); }
    std::optional<Rat> omega(const Elt& a) const override {
        auto o = base_->omega(a);
        if (!o) return std::nullopt;
        return *o * Rat(f_, 1);
    }
    bool contains(const Elt& a) const override { return base_->contains(a); }
    Elt random_element(Rng& rng) const override { return base_->random_element(rng); }
    Elt random_element_deep(Rng& rng, Rat nu) const override {
        return base_->random_element_deep(rng, Rat(nu.num, nu.den * f_));
    }
    OrderedBasis ordered_basis() const override {
        OrderedBasis b = base_->ordered_basis();
        for (auto& v : b.valuations) v = v * Rat(f_, 1);
        return b;
    }
    std::vector<Elt> filtration_generators(Rat nu) const override {
        return base_->filtration_generators(Rat(nu.num, nu.den * f_));
    }
    std::vector<int64_t> key(const Elt& a, Rat level) const override {
        return base_->key(a, Rat(level.num, level.den * f_));
    }
    int omega_den() const override { return base_->omega_den(); }
    Rat omega_min() const override { return base_->omega_min() * Rat(f_, 1); }
    std::string describe() const override { return base_->describe() + " with omega scaled"; }

  private:
    GroupPtr base_;
    int64_t f_;
};

}  // namespace

GroupPtr with_omega_shift(GroupPtr g, Rat shift) {
    return std::make_shared<OmegaShiftGroup>(std::move(g), shift);
}

GroupPtr with_omega_scaled(GroupPtr g, int64_t factor) {
    return std::make_shared<OmegaScaleGroup>(std::move(g), factor);
}

}  // namespace lazardlab
