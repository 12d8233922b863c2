#include <doctest.h>

#include <set>

#include "lazardlab/complex.hpp"
#include "lazardlab/snf.hpp"
#include "support/oracles.hpp"

using namespace lazardlab;

namespace {

bool is_divisibility_chain(const std::vector<int64_t>& d) {
    for (size_t i = 0; i + 1 < d.size(); ++i) {
        if (d[i] == 0 && d[i + 1] != 0) return false;
        if (d[i] != 0 && d[i + 1] != 0 && d[i + 1] % d[i] != 0) return false;
    }
    return true;
}

IntMat diag2(int64_t a, int64_t b) {
    IntMat m = IntMat::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

}  // namespace

TEST_CASE("snf over Z: pinned examples") {
    CHECK(snf(IntMat::Identity(2, 2), SnfRing{}).divisors == std::vector<int64_t>{1, 1});
    IntMat a(2, 2);
    a << 2, 4, 6, 8;
    // oracle: d1 = gcd of entries = 2, d1*d2 = |det| = 8
    CHECK(snf(a, SnfRing{}).divisors == std::vector<int64_t>{2, 4});
    CHECK(oracles::snf_oracle(a) == std::vector<int64_t>{2, 4});
    IntMat z(1, 1);
    z << 0;
    CHECK(oracles::snf_oracle(z) == std::vector<int64_t>{0});
    CHECK(oracles::snf_oracle(diag2(6, 10)) == std::vector<int64_t>{2, 30});
    IntMat empty(0, 0);
    CHECK(snf(empty, SnfRing{}).divisors.empty());
}

TEST_CASE("snf over Z/p^k: single entry") {
    IntMat a(1, 1);
    a << 3;
    CHECK(snf(a, SnfRing{3, 3}).divisors == std::vector<int64_t>{3});
}

TEST_CASE("snf matches the brute-force oracle on random matrices") {
    Rng rng(2024);
    std::uniform_int_distribution<int> dim(1, 8);
    for (int t = 0; t < 500; ++t) {
        IntMat a = oracles::random_int_matrix(rng, dim(rng), dim(rng), t % 3 == 0 ? 3 : 40);
        auto got = snf(a, SnfRing{}).divisors;
        CHECK(got == oracles::snf_oracle(a));
        CHECK(is_divisibility_chain(got));
    }
    CHECK_THROWS_AS(oracles::snf_oracle(IntMat::Zero(9, 3)), BudgetError);
}

TEST_CASE("snf over Z with transforms: U A V = diag") {
    // transform entries can exceed int64 on larger random inputs (the engine
    // then throws OverflowError); keep this within comfortably exact range
    Rng rng(77);
    for (int t = 0; t < 100; ++t) {
        int r = 1 + t % 4, c = 1 + (t / 2) % 4;
        IntMat a = oracles::random_int_matrix(rng, r, c, 9);
        SnfOptions o;
        o.want_u = true;
        o.want_v = true;
        SNFResult s = snf(a, SnfRing{}, o);
        IntMat d = s.u * a * s.v;
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) {
                if (i == j)
                    CHECK(d(i, j) == s.divisors[i]);
                else
                    CHECK(d(i, j) == 0);
            }
    }
}

TEST_CASE("local snf: transforms, exponents, and dense/sparse agreement") {
    Rng rng(31);
    const int64_t p = 3;
    const int k = 4;
    const int64_t pk = pow_i64(p, k);
    for (int t = 0; t < 120; ++t) {
        int r = 1 + t % 6, c = 1 + (t / 3) % 6;
        IntMat a = mat_mod(oracles::random_int_matrix(rng, r, c, 200), pk);
        SnfOptions o;
        o.want_u = true;
        o.want_v = true;
        o.want_v_inv = true;
        SNFResult s = snf(a, SnfRing{p, k}, o);
        CHECK(is_divisibility_chain(s.divisors));
        IntMat d = mat_mul_mod(mat_mul_mod(s.u, a, pk), s.v, pk);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j)
                CHECK(d(i, j) == (i == j ? mod_reduce(s.divisors[i], pk) : 0));
        CHECK(mat_mul_mod(s.v, s.v_inv, pk) == IntMat::Identity(c, c));
        // sparse path forced
        SnfOptions o2;
        o2.want_v = true;
        o2.want_v_inv = true;
        SNFResult s2 = snf_sparse(SparseMat::from_dense(a), SnfRing{p, k}, o2);
        CHECK(s2.divisors == s.divisors);
        IntMat av = mat_mul_mod(a, s2.v, pk);
        // A*V has column j supported where U^{-1} diag lives; check via V^{-1} consistency
        CHECK(mat_mul_mod(s2.v, s2.v_inv, pk) == IntMat::Identity(c, c));
        // divisor exponents: A * v_j == 0 mod p^k exactly when the slot exponent is k
        for (int j = 0; j < c; ++j) {
            bool zero = true;
            for (int i = 0; i < r; ++i) zero = zero && av(i, j) == 0;
            int e = s2.col_exponents[j];
            if (e >= k) CHECK(zero);
        }
    }
}

TEST_CASE("solvers") {
    Rng rng(8);
    for (int t = 0; t < 60; ++t) {
        IntMat a = oracles::random_int_matrix(rng, 4, 3, 9);
        IntMat x = oracles::random_int_matrix(rng, 3, 2, 9);
        IntMat b = a * x;
        IntMat got = solve_in_lattice_z(a, b);
        CHECK(a * got == b);
        IntMat kmat = kernel_lattice_z(a);
        CHECK((a * kmat).isZero());
    }
    // local solve
    const int64_t p = 3;
    const int k = 3;
    const int64_t pk = pow_i64(p, k);
    for (int t = 0; t < 60; ++t) {
        IntMat a = mat_mod(oracles::random_int_matrix(rng, 4, 4, 80), pk);
        IntVec x(4);
        for (int i = 0; i < 4; ++i) x(i) = std::uniform_int_distribution<int64_t>(0, pk - 1)(rng);
        IntVec b(4);
        for (int i = 0; i < 4; ++i) {
            __int128 acc = 0;
            for (int j = 0; j < 4; ++j) acc += static_cast<__int128>(a(i, j)) * x(j);
            b(i) = mod_reduce(static_cast<int64_t>(acc % pk), pk);
        }
        auto sol = solve_local(a, b, p, k);
        REQUIRE(sol.has_value());
        for (int i = 0; i < 4; ++i) {
            __int128 acc = 0;
            for (int j = 0; j < 4; ++j) acc += static_cast<__int128>(a(i, j)) * (*sol)(j);
            CHECK(mod_reduce(static_cast<int64_t>(acc % pk), pk) == b(i));
        }
    }
}

TEST_CASE("howell span membership agrees with brute force") {
    const int64_t p = 3;
    const int k = 2;
    const int64_t pk = 9;
    Rng rng(55);
    for (int t = 0; t < 40; ++t) {
        // random submodule of (Z/9)^3 from two generators
        IntMat g = mat_mod(oracles::random_int_matrix(rng, 3, 2, 40), pk);
        HowellSpan span(3, p, k);
        for (int j = 0; j < 2; ++j) {
            HowellSpan::Col c;
            for (int i = 0; i < 3; ++i)
                if (g(i, j)) c.push_back({i, g(i, j)});
            span.add(std::move(c));
        }
        // brute force: enumerate all lambda in (Z/9)^2
        std::set<std::array<int64_t, 3>> members;
        for (int64_t l0 = 0; l0 < pk; ++l0)
            for (int64_t l1 = 0; l1 < pk; ++l1) {
                std::array<int64_t, 3> v{};
                for (int i = 0; i < 3; ++i) v[i] = mod_reduce(l0 * g(i, 0) + l1 * g(i, 1), pk);
                members.insert(v);
            }
        for (int trial = 0; trial < 100; ++trial) {
            std::array<int64_t, 3> v{};
            for (int i = 0; i < 3; ++i) v[i] = std::uniform_int_distribution<int64_t>(0, pk - 1)(rng);
            HowellSpan::Col c;
            for (int i = 0; i < 3; ++i)
                if (v[i]) c.push_back({static_cast<int>(i), v[i]});
            bool member = span.reduce(c).empty();
            CHECK(member == (members.count(v) > 0));
        }
    }
}

TEST_CASE("module divisors of generated columns") {
    // single residue p^{k-1} e_1 generates Z/p
    std::vector<HowellSpan::Col> cols{{{0, 9}}};
    CHECK(module_divisors_of_columns(cols, 3, 3) == std::vector<int64_t>{3});
    // unit vector generates a full Z/p^k
    std::vector<HowellSpan::Col> cols2{{{1, 1}}};
    CHECK(module_divisors_of_columns(cols2, 3, 3) == std::vector<int64_t>{27});
    // two independent unit vectors
    std::vector<HowellSpan::Col> cols3{{{0, 1}}, {{2, 4}}};
    CHECK(module_divisors_of_columns(cols3, 3, 3) == std::vector<int64_t>{27, 27});
}

TEST_CASE("matrix text io round trip") {
    IntMat a(2, 3);
    a << 1, -2, 3, 0, 5, 9;
    std::stringstream ss;
    write_matrix_text(ss, a, 0);
    auto [b, mod] = read_matrix_text(ss);
    CHECK(mod == 0);
    CHECK(a == b);
}
