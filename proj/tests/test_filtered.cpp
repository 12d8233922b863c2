#include <doctest.h>

#include "lazardlab/filtered.hpp"
#include "lazardlab/pgroups.hpp"

using namespace lazardlab;

namespace {

MatrixGroupSpec spec_zp_line(int64_t p, int level, int N) {
    MatrixGroupSpec s;
    s.p = p;
    s.n = 1;
    s.level = level;
    s.precision_N = N;
    return s;
}

MatrixGroupSpec spec_gl2_level1(int N = 8) {
    MatrixGroupSpec s;
    s.p = 3;
    s.n = 2;
    s.level = 1;
    s.precision_N = N;
    return s;
}

MatrixGroupSpec spec_ramified_pi(int64_t p, int N = 8) {
    MatrixGroupSpec s;
    s.p = p;
    s.e = 2;
    s.eisenstein_poly = {-p, 0, 1};
    s.n = 1;
    s.level = 1;
    s.precision_N = N;
    return s;
}

}  // namespace

TEST_CASE("filtration axioms hold on 1+3M_2(Z_3)") {
    GroupPtr g = build_group(spec_gl2_level1());
    FiltrationReport rep = check_filtration(*g, 60, 2024);
    CHECK(rep.all_pass());
    for (const char* key : {"1", "2", "p-filtered", "3", "4", "5"})
        CHECK(rep.axioms.at(key).status == AxiomStatus::Holds);
    CHECK(rep.axioms.at("6").status == AxiomStatus::Holds);
    CHECK(rep.axioms.at("7").status == AxiomStatus::HoldsByConstruction);
    CHECK(!rep.value_set.empty());
}

TEST_CASE("ramified axiom-5 spot check: (1+pi)^3 has omega 3/2 for pi^2=3") {
    MatrixGroupSpec s = spec_ramified_pi(3);
    s.allow_unsaturated = true;  // level 1 < rho = 2: not p-valued, axiom 4 fails
    GroupPtr g = build_group(s);
    Elt x = g->identity();
    x.at(0, 0) = x.at(0, 0) + PAdicScalar(g->ring(), {0, 1});
    CHECK(*g->omega(x) == Rat(1, 2));
    CHECK(*g->omega(g->pow(x, 3)) == Rat(3, 2));
    FiltrationReport rep = check_filtration(*g, 40, 7);
    CHECK(rep.axioms.at("4").status == AxiomStatus::Fails);  // omega_min = 1/2 = 1/(p-1)
}

TEST_CASE("doubling the filtration breaks axiom 5 with a witness") {
    GroupPtr g = with_omega_scaled(build_group(spec_zp_line(3, 1, 6)), 2);
    FiltrationReport rep = check_filtration(*g, 30, 5);
    CHECK(rep.axioms.at("5").status == AxiomStatus::Fails);
    CHECK(!rep.axioms.at("5").witness.empty());
}

TEST_CASE("graded pieces of 1+3Z_3 are one-dimensional") {
    GroupPtr g = build_group(spec_zp_line(3, 1, 6));
    auto pieces = graded_pieces(*g, Rat(3, 1));
    REQUIRE(pieces.size() == 3);
    for (const auto& piece : pieces) {
        CHECK(piece.dim == 1);
        // eps action is injective (freeness of gr over Fp[eps])
        CHECK(rank_mod_p(piece.eps_action, 3) == 1);
    }
}

TEST_CASE("graded pieces of the saturation subgroup 1+3R, pi^2=3: k^n per degree") {
    MatrixGroupSpec s = spec_ramified_pi(3);
    s.level = 2;  // rho = 2, so H = 1 + pi^2 R = 1 + 3R
    GroupPtr g = build_group(s);
    auto pieces = graded_pieces(*g, Rat(5, 2));
    REQUIRE(pieces.size() >= 3);
    for (const auto& piece : pieces) CHECK(piece.dim == 1);  // n^2 = 1 per (1/e)-degree
    // rank over Fp[eps] = n^2 [R : Z_p] = 2
    CHECK(group_rank(*g) == 2);
    OrderedBasis b = find_ordered_basis(*g);
    CHECK(b.valuations == std::vector<Rat>{Rat(1, 1), Rat(3, 2)});
    CHECK_FALSE(b.equi_p_valued);
}

TEST_CASE("explicit ramified bases per the two filtrations, p=5, pi^2=5") {
    // pi-adic filtration on G = 1+pi R: basis (1+pi, 1+pi^2), omega (1/2, 1)
    GroupPtr g = build_group(spec_ramified_pi(5));
    OrderedBasis b = find_ordered_basis(*g);
    REQUIRE(b.elements.size() == 2);
    CHECK(b.valuations == std::vector<Rat>{Rat(1, 2), Rat(1, 1)});
    CHECK_FALSE(b.equi_p_valued);
    CHECK(*g->omega(b.elements[0]) == Rat(1, 2));
    CHECK(*g->omega(b.elements[1]) == Rat(1, 1));

    // Weil filtration on G' = 1+5R: basis (1+5, 1+pi^3), omega' = (1, 1)
    MatrixGroupSpec ws = spec_ramified_pi(5);
    ws.filtration = FiltrationKind::Weil;
    GroupPtr gw = build_group(ws);
    OrderedBasis bw = find_ordered_basis(*gw);
    REQUIRE(bw.elements.size() == 2);
    CHECK(bw.valuations == std::vector<Rat>{Rat(1, 1), Rat(1, 1)});
    CHECK(bw.equi_p_valued);
    FiltrationReport rep = check_filtration(*gw, 40, 11);
    CHECK(rep.all_pass());

    // under the inclusion G' in G the same elements have omega = (1, 3/2)
    Elt x1 = g->identity();
    x1.at(0, 0) = x1.at(0, 0) + PAdicScalar(g->ring(), 5);
    Elt x2 = g->identity();
    x2.at(0, 0) = x2.at(0, 0) + PAdicScalar(g->ring(), {0, 1}).pi_shift(2);  // 1 + pi^3
    CHECK(*g->omega(x1) == Rat(1, 1));
    CHECK(*g->omega(x2) == Rat(3, 2));
    CHECK(*gw->omega(x1) == Rat(1, 1));
    CHECK(*gw->omega(x2) == Rat(1, 1));
}

TEST_CASE("product of d lines has d generators of valuation 1") {
    MatrixGroupSpec s;
    s.p = 3;
    s.n = 3;
    s.level = 1;
    s.shape = Shape::Diagonal;
    s.precision_N = 6;
    GroupPtr g = build_group(s);
    OrderedBasis b = find_ordered_basis(*g);
    CHECK(b.elements.size() == 3);
    CHECK(b.equi_p_valued);
    for (const Rat& v : b.valuations) CHECK(v == Rat(1, 1));
}

TEST_CASE("gl2 basis: rank 4, all valuations 1, equi-p-valued") {
    GroupPtr g = build_group(spec_gl2_level1(6));
    OrderedBasis b = find_ordered_basis(*g);
    CHECK(b.elements.size() == 4);
    CHECK(b.equi_p_valued);
    OrderedBasis structural = g->ordered_basis();
    CHECK(structural.elements.size() == 4);
    CHECK(structural.equi_p_valued);
}

TEST_CASE("eps action is injective on tested degrees for p-valued fixtures") {
    for (GroupPtr g : {build_group(spec_gl2_level1(6)), build_group(spec_ramified_pi(5, 8))}) {
        auto pieces = graded_pieces(*g, Rat(2, 1));
        for (const auto& piece : pieces) {
            if (piece.eps_action.rows() == 0) continue;
            CHECK(rank_mod_p(piece.eps_action, g->p()) == piece.dim);
        }
    }
}

TEST_CASE("saturate_filtered_free") {
    FilteredFreeModule m0{3, {Rat(0, 1), Rat(0, 1), Rat(0, 1)}, "A"};
    auto r0 = saturate_filtered_free(m0, 1);
    CHECK(r0.rescale_exponents == std::vector<int64_t>{0, 0, 0});
    CHECK(r0.module.generator_valuations == m0.generator_valuations);

    FilteredFreeModule m1{2, {Rat(1, 1), Rat(2, 1)}, "B"};
    auto r1 = saturate_filtered_free(m1, 1);
    CHECK(r1.rescale_exponents == std::vector<int64_t>{1, 2});
    CHECK(r1.module.generator_valuations == std::vector<Rat>{Rat(0, 1), Rat(0, 1)});

    // idempotent
    auto r2 = saturate_filtered_free(r1.module, 1);
    CHECK(r2.rescale_exponents == std::vector<int64_t>{0, 0});

    FilteredFreeModule ram{2, {Rat(1, 2), Rat(1, 1)}, "A"};
    auto r3 = saturate_filtered_free(ram, 2);
    CHECK(r3.rescale_exponents == std::vector<int64_t>{1, 2});
    CHECK(r3.module.rank == 2);
}

TEST_CASE("groupring valuation bookkeeping") {
    OrderedBasis b;
    b.valuations = {Rat(1, 2), Rat(1, 1)};
    CHECK(groupring_valuation({0, 0}, b) == Rat(0, 1));
    CHECK(groupring_valuation({2, 1}, b) == Rat(2, 1));
    OrderedBasis b3;
    b3.valuations = {Rat(1, 1), Rat(1, 1), Rat(1, 1)};
    CHECK(groupring_valuation({1, 1, 1}, b3) == Rat(3, 1));
    CHECK_THROWS_AS(groupring_valuation({1}, b3), DomainError);
}
