#include "lazardlab/fixtures.hpp"

namespace lazardlab::fixtures {

MatrixGroupSpec zp_line(int64_t p, int level, int N) {
    MatrixGroupSpec s;
    s.p = p;
    s.n = 1;
    s.level = level;
    s.precision_N = N;
    return s;
}

MatrixGroupSpec abelian_product(int d, int64_t p, int N) {
    MatrixGroupSpec s;
    s.p = p;
    s.n = d;
    s.level = 1;
    s.shape = Shape::Diagonal;
    s.precision_N = N;
    return s;
}

MatrixGroupSpec heisenberg(int N) {
    MatrixGroupSpec s;
    s.p = 3;
    s.n = 3;
    s.level = 1;
    s.shape = Shape::UnipotentUpper;
    s.precision_N = N;
    s.fixture_tag = "heisenberg";
    return s;
}

MatrixGroupSpec gl2_level1(int N) {
    MatrixGroupSpec s;
    s.p = 3;
    s.n = 2;
    s.level = 1;
    s.precision_N = N;
    return s;
}

MatrixGroupSpec ramified_pi(int64_t p, int N) {
    MatrixGroupSpec s;
    s.p = p;
    s.e = 2;
    s.eisenstein_poly = {-p, 0, 1};
    s.n = 1;
    s.level = 1;
    s.precision_N = N;
    return s;
}

MatrixGroupSpec ramified_weil(int64_t p, int N) {
    MatrixGroupSpec s = ramified_pi(p, N);
    s.filtration = FiltrationKind::Weil;
    return s;
}

LieLattice quaternion_lattice(int64_t p) {
    // non-residue for u^2 = c
    int64_t c = 0;
    for (int64_t cand = 2; cand < p && !c; ++cand) {
        bool residue = false;
        for (int64_t x = 1; x < p; ++x)
            if (x * x % p == cand) residue = true;
        if (!residue) c = cand;
    }
    LieLattice l;
    l.rank = 4;
    l.p = p;
    l.prec_exp = 0;  // exact integer constants
    l.constants.assign(64, 0);
    l.basis_valuations = {Rat(1, 2), Rat(1, 2), Rat(1, 1), Rat(1, 1)};
    l.provenance = "quaternion maximal order lattice Pi*O, u^2=" + std::to_string(c);
    auto set = [&](int i, int j, int k, int64_t v) {
        l.set_c(i, j, k, v);
        l.set_c(j, i, k, -v);
    };
    // basis e1 = Pi, e2 = uPi, e3 = p, e4 = pu:
    // [Pi, uPi] = -2pu, [Pi, pu] = -2p uPi, [uPi, pu] = -2cp Pi
    set(0, 1, 3, -2);
    set(0, 3, 1, -2 * p);
    set(1, 3, 0, -2 * c * p);
    l.validate();
    return l;
}

GroupPtr group_by_name(const std::string& name, int64_t p_override, int precision_override) {
    auto N = [&](int def) { return precision_override ? precision_override : def; };
    if (name == "z3-line") return build_group(zp_line(3, 1, N(8)));
    if (name == "z3-line-level2") return build_group(zp_line(3, 2, N(8)));
    if (name == "z3-abelian-2") return build_group(abelian_product(2, 3, N(8)));
    if (name == "z3-abelian-3") return build_group(abelian_product(3, 3, N(8)));
    if (name == "heisenberg") return build_group(heisenberg(N(8)));
    if (name == "gl2-level1") return build_group(gl2_level1(N(8)));
    if (name == "ramified-pi") return build_group(ramified_pi(p_override ? p_override : 5, N(8)));
    if (name == "ramified-weil") return build_group(ramified_weil(p_override ? p_override : 5, N(8)));
    if (name == "quaternion-units")
        return build_quaternion_units(p_override ? p_override : 5, N(6));
    if (name == "z2-line") return build_group(zp_line(2, 2, N(8)));
    if (name == "z2-line-unsaturated") {
        MatrixGroupSpec s = zp_line(2, 1, N(8));
        s.allow_unsaturated = true;
        return build_group(s);
    }
    throw DomainError("unknown group fixture: " + name);
}

std::vector<std::string> group_fixture_names() {
    return {"z3-line",    "z3-line-level2", "z3-abelian-2",   "z3-abelian-3",
            "heisenberg", "gl2-level1",     "ramified-pi",    "ramified-weil",
            "quaternion-units", "z2-line",  "z2-line-unsaturated"};
}

}  // namespace lazardlab::fixtures
