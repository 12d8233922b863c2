#pragma once

#include "lazardlab/formal_groups.hpp"
#include "lazardlab/lazard_lie.hpp"
#include "lazardlab/pgroups.hpp"

namespace lazardlab::fixtures {

MatrixGroupSpec zp_line(int64_t p = 3, int level = 1, int N = 8);
// (1 + p Z_p)^d as diagonal congruence matrices
MatrixGroupSpec abelian_product(int d, int64_t p = 3, int N = 8);
MatrixGroupSpec heisenberg(int N = 8);
MatrixGroupSpec gl2_level1(int N = 8);
// G = 1 + pi R for R = Z_p[pi], pi^2 = p, with the pi-adic filtration
MatrixGroupSpec ramified_pi(int64_t p = 5, int N = 8);
// G' = 1 + p R with the Weil-restriction filtration
MatrixGroupSpec ramified_weil(int64_t p = 5, int N = 8);

// the maximal-order quaternion lattice Pi*O in the basis (Pi, uPi, p, pu),
// with exact integer structure constants
LieLattice quaternion_lattice(int64_t p = 5);

// named group fixtures for the harness; throws DomainError on unknown names
GroupPtr group_by_name(const std::string& name, int64_t p_override = 0, int precision_override = 0);
std::vector<std::string> group_fixture_names();

}  // namespace lazardlab::fixtures
