#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <vector>

#include "lazardlab/common.hpp"

namespace lazardlab {

using IntMat = Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVec = Eigen::Matrix<int64_t, Eigen::Dynamic, 1>;

inline IntMat mat_mod(IntMat a, int64_t m) {
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = mod_reduce(a(i, j), m);
    return a;
}

inline IntMat mat_mul_mod(const IntMat& a, const IntMat& b, int64_t m) {
    IntMat r = IntMat::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            if (a(i, k) == 0) continue;
            for (Eigen::Index j = 0; j < b.cols(); ++j)
                r(i, j) = static_cast<int64_t>((static_cast<__int128>(a(i, k)) * b(k, j) + r(i, j)) % m);
        }
    for (Eigen::Index i = 0; i < r.rows(); ++i)
        for (Eigen::Index j = 0; j < r.cols(); ++j) r(i, j) = mod_reduce(r(i, j), m);
    return r;
}

inline int64_t rank_mod_p(IntMat a, int64_t p) {
    a = mat_mod(std::move(a), p);
    int64_t rank = 0;
    Eigen::Index rows = a.rows(), cols = a.cols();
    for (Eigen::Index col = 0, row = 0; col < cols && row < rows; ++col) {
        Eigen::Index piv = -1;
        for (Eigen::Index i = row; i < rows; ++i)
            if (a(i, col) != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        a.row(piv).swap(a.row(row));
        int64_t inv = inv_mod(a(row, col), p);
        for (Eigen::Index i = row + 1; i < rows; ++i) {
            if (a(i, col) == 0) continue;
            int64_t f = mulmod(a(i, col), inv, p);
            for (Eigen::Index j = col; j < cols; ++j)
                a(i, j) = mod_reduce(a(i, j) - mulmod(f, a(row, j), p), p);
        }
        ++row;
        ++rank;
    }
    return rank;
}

// matrix text format: first line "rows cols modulus" (modulus 0 for Z), then
// row-major whitespace-separated integers
void write_matrix_text(std::ostream& os, const IntMat& a, int64_t modulus);
std::pair<IntMat, int64_t> read_matrix_text(std::istream& is);

// sparse column-major matrix used by the large bar-complex eliminations
struct SparseMat {
    int rows = 0;
    int cols = 0;
    // each column: (row, value) sorted by row, values nonzero
    std::vector<std::vector<std::pair<int, int64_t>>> col;

    SparseMat() = default;
    SparseMat(int r, int c) : rows(r), cols(c), col(c) {}

    static SparseMat from_dense(const IntMat& a) {
        SparseMat s(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
        for (int j = 0; j < s.cols; ++j)
            for (int i = 0; i < s.rows; ++i)
                if (a(i, j) != 0) s.col[j].push_back({i, a(i, j)});
        return s;
    }
    IntMat to_dense() const {
        IntMat a = IntMat::Zero(rows, cols);
        for (int j = 0; j < cols; ++j)
            for (auto& [i, v] : col[j]) a(i, j) = v;
        return a;
    }
    size_t nnz() const {
        size_t n = 0;
        for (auto& c : col) n += c.size();
        return n;
    }
};

}  // namespace lazardlab
