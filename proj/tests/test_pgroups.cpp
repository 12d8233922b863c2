#include <doctest.h>

#include <set>

#include "lazardlab/pgroups.hpp"

using namespace lazardlab;

namespace {

MatrixGroupSpec heisenberg_spec(int N = 8) {
    MatrixGroupSpec s;
    s.p = 3;
    s.n = 3;
    s.level = 1;
    s.shape = Shape::UnipotentUpper;
    s.precision_N = N;
    return s;
}

MatrixGroupSpec line_spec(int64_t p, int level, int N) {
    MatrixGroupSpec s;
    s.p = p;
    s.n = 1;
    s.level = level;
    s.precision_N = N;
    return s;
}

MatrixGroupSpec gl2_spec(int N = 8) {
    MatrixGroupSpec s;
    s.p = 3;
    s.n = 2;
    s.level = 1;
    s.precision_N = N;
    return s;
}

}  // namespace

TEST_CASE("build_group rejects levels below rho") {
    MatrixGroupSpec s = line_spec(2, 1, 6);
    CHECK_THROWS_AS(build_group(s), DomainError);
    s.allow_unsaturated = true;
    CHECK_NOTHROW(build_group(s));
    MatrixGroupSpec r;
    r.p = 3;
    r.e = 2;
    r.eisenstein_poly = {-3, 0, 1};
    r.level = 1;  // rho = 2
    r.precision_N = 6;
    CHECK_THROWS_AS(build_group(r), DomainError);
}

TEST_CASE("heisenberg model: rank 3, equi-p-valued") {
    GroupPtr g = build_group(heisenberg_spec(6));
    OrderedBasis b = find_ordered_basis(*g);
    CHECK(b.elements.size() == 3);
    CHECK(b.equi_p_valued);
    FiltrationReport rep = check_filtration(*g, 40, 99);
    CHECK(rep.all_pass());
}

TEST_CASE("finite quotient of 1+3Z_3 at level 2 is cyclic of order 3") {
    GroupPtr g = build_group(line_spec(3, 1, 6));
    FiniteQuotient q(g, 2);
    CHECK(q.order() == 3);
    REQUIRE(q.generators().size() == 1);
    int x = q.generators()[0];
    CHECK(x != q.id());
    CHECK(q.pow(x, 3) == q.id());
    CHECK(q.mul(x, q.mul(x, x)) == q.id());
}

TEST_CASE("heisenberg quotient at level 2 has order 27 and exponent 3") {
    GroupPtr g = build_group(heisenberg_spec(6));
    FiniteQuotient q(g, 2);
    CHECK(q.order() == 27);
    int64_t exponent = 1;
    for (int a = 0; a < q.order(); ++a) {
        int64_t o = 1;
        int cur = a;
        while (cur != q.id()) {
            cur = q.mul(cur, a);
            ++o;
        }
        exponent = std::max(exponent, o);
    }
    CHECK(exponent == 3);
}

TEST_CASE("quotient towers: projections are group homomorphisms") {
    for (GroupPtr g : {build_group(line_spec(3, 1, 8)), build_group(heisenberg_spec(8))}) {
        for (int m = 2; m <= 3; ++m) {
            FiniteQuotient small(g, m);
            FiniteQuotient big(g, m + 1);
            CHECK(big.order() % small.order() == 0);
            for (int a = 0; a < big.order(); ++a)
                for (int b = 0; b < std::min<int64_t>(big.order(), 20); ++b) {
                    int lhs = small.project_from(big, big.mul(a, b));
                    int rhs = small.mul(small.project_from(big, a), small.project_from(big, b));
                    CHECK(lhs == rhs);
                }
        }
    }
}

TEST_CASE("lower p-series of 1+3M_2(Z_3): indices all 3^4, jumps match omega") {
    GroupPtr g = build_group(gl2_spec(8));
    LowerPSeries s = lower_p_series(g, 4);
    REQUIRE(s.indices.size() == 4);
    for (int64_t idx : s.indices) CHECK(idx == 81);
    for (bool m : s.omega_jumps_match) CHECK(m);
}

TEST_CASE("lower p-series of 1+3Z_3: indices all 3") {
    GroupPtr g = build_group(line_spec(3, 1, 8));
    LowerPSeries s = lower_p_series(g, 4);
    for (int64_t idx : s.indices) CHECK(idx == 3);
    for (bool m : s.omega_jumps_match) CHECK(m);
}

TEST_CASE("heisenberg lower p-series: constant indices 27, jumps match omega") {
    GroupPtr g = build_group(heisenberg_spec(8));
    LowerPSeries s = lower_p_series(g, 3);
    for (int64_t idx : s.indices) CHECK(idx == 27);
    for (bool m : s.omega_jumps_match) CHECK(m);
}

TEST_CASE("uniformity verdicts") {
    CHECK(check_uniform(build_group(gl2_spec(8)), 3).uniform());
    CHECK(check_uniform(build_group(heisenberg_spec(8)), 3).uniform());
    // Z_2^* = 1+2Z_2 is not uniform but 1+4Z_2 is
    MatrixGroupSpec bad = line_spec(2, 1, 8);
    bad.allow_unsaturated = true;
    UniformityVerdict vb = check_uniform(build_group(bad), 3);
    CHECK_FALSE(vb.uniform());
    CHECK_FALSE(vb.indices_constant);
    UniformityVerdict vg = check_uniform(build_group(line_spec(2, 2, 8)), 3);
    CHECK(vg.uniform());
}

TEST_CASE("quaternion units: saturated, rank 4, gr generated in two degrees") {
    GroupPtr g = build_quaternion_units(5, 6);
    FiltrationReport rep = check_filtration(*g, 40, 3);
    CHECK(rep.all_pass());
    OrderedBasis b = find_ordered_basis(*g);
    REQUIRE(b.elements.size() == 4);
    CHECK(b.valuations == std::vector<Rat>{Rat(1, 2), Rat(1, 2), Rat(1, 1), Rat(1, 1)});
    CHECK_FALSE(b.equi_p_valued);
    // structural basis agrees
    OrderedBasis sb = g->ordered_basis();
    CHECK(sb.valuations == b.valuations);
    CHECK_FALSE(sb.equi_p_valued);
}

TEST_CASE("quaternion representation identities") {
    GroupPtr g = build_quaternion_units(5, 6);
    OrderedBasis b = g->ordered_basis();
    // x1 = 1 + rho(Pi): (1+rho(Pi))^2 = 1 + 2 rho(Pi) + p; omega jumps as expected
    CHECK(*g->omega(b.elements[0]) == Rat(1, 2));
    CHECK(*g->omega(g->p_power(b.elements[0])) == Rat(3, 2));
    CHECK(*g->omega(b.elements[2]) == Rat(1, 1));
    // commutator of the two degree-1/2 generators has omega >= 1
    Elt c = g->commutator(b.elements[0], b.elements[1]);
    auto oc = g->omega(c);
    REQUIRE(oc.has_value());
    CHECK(*oc >= Rat(1, 1));
}

TEST_CASE("renormalized valuation: 1+9Z_3 gets basis valuation 1") {
    GroupPtr g = build_group(line_spec(3, 2, 8));
    OrderedBasis b0 = g->ordered_basis();
    CHECK(b0.valuations == std::vector<Rat>{Rat(2, 1)});
    GroupPtr r = renormalize_valuation(g);
    OrderedBasis b1 = r->ordered_basis();
    CHECK(b1.valuations == std::vector<Rat>{Rat(1, 1)});
    FiltrationReport rep = check_filtration(*r, 40, 17);
    CHECK(rep.all_pass());
    // t = 1 renormalization is the identity
    GroupPtr same = renormalize_valuation(build_group(line_spec(3, 1, 8)));
    CHECK(same->ordered_basis().valuations == std::vector<Rat>{Rat(1, 1)});
    // p = 2 unsupported
    CHECK_THROWS_AS(renormalize_valuation(build_group(line_spec(2, 2, 8))), DomainError);
}

TEST_CASE("group spec round trip") {
    MatrixGroupSpec s = heisenberg_spec(7);
    s.fixture_tag = "heisenberg";
    std::stringstream ss;
    write_group_spec(ss, s);
    MatrixGroupSpec t = parse_group_spec(ss);
    CHECK(t.p == s.p);
    CHECK(t.n == s.n);
    CHECK(t.level == s.level);
    CHECK(t.shape == s.shape);
    CHECK(t.fixture_tag == s.fixture_tag);
    CHECK(t.precision_N == s.precision_N);
}

TEST_CASE("matrix inverse is exact at precision") {
    GroupPtr g = build_group(gl2_spec(6));
    Rng rng(31);
    for (int t = 0; t < 25; ++t) {
        Elt a = g->random_element(rng);
        CHECK(g->mul(a, g->inv(a)) == g->identity());
    }
}
