#pragma once

#include <functional>
#include <vector>

#include "lazardlab/padic.hpp"

namespace lazardlab {

// Dense matrix over R/pi^N. omega(A) = min entry valuation (in pi-units) obeys
// omega(A+B) >= min(omega A, omega B) and omega(AB) >= omega(A) + omega(B).
class PAdicMatrix {
  public:
    PAdicMatrix() = default;
    PAdicMatrix(Ring ring, int rows, int cols)
        : ring_(std::move(ring)), rows_(rows), cols_(cols), data_(rows * cols, PAdicScalar(ring_)) {}

    static PAdicMatrix identity(const Ring& ring, int n) {
        PAdicMatrix m(ring, n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = PAdicScalar(ring, 1);
        return m;
    }

    const Ring& ring() const { return ring_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    PAdicScalar& at(int i, int j) { return data_[i * cols_ + j]; }
    const PAdicScalar& at(int i, int j) const { return data_[i * cols_ + j]; }

    friend PAdicMatrix operator+(const PAdicMatrix& a, const PAdicMatrix& b) {
        PAdicMatrix r(a.ring_, a.rows_, a.cols_);
        for (size_t i = 0; i < a.data_.size(); ++i) r.data_[i] = a.data_[i] + b.data_[i];
        return r;
    }
    friend PAdicMatrix operator-(const PAdicMatrix& a, const PAdicMatrix& b) {
        PAdicMatrix r(a.ring_, a.rows_, a.cols_);
        for (size_t i = 0; i < a.data_.size(); ++i) r.data_[i] = a.data_[i] - b.data_[i];
        return r;
    }
    friend PAdicMatrix operator*(const PAdicMatrix& a, const PAdicMatrix& b) {
        if (a.cols_ != b.rows_) throw DomainError("PAdicMatrix: shape mismatch");
        PAdicMatrix r(a.ring_, a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                if (a.at(i, k).is_zero()) continue;
                for (int j = 0; j < b.cols_; ++j) {
                    if (b.at(k, j).is_zero()) continue;
                    r.at(i, j) = r.at(i, j) + a.at(i, k) * b.at(k, j);
                }
            }
        return r;
    }
    PAdicMatrix scaled(const PAdicScalar& c) const {
        PAdicMatrix r(ring_, rows_, cols_);
        for (size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] * c;
        return r;
    }
    PAdicMatrix scaled(int64_t n) const {
        PAdicMatrix r(ring_, rows_, cols_);
        for (size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i].scaled(n);
        return r;
    }

    friend bool operator==(const PAdicMatrix& a, const PAdicMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }
    friend bool operator!=(const PAdicMatrix& a, const PAdicMatrix& b) { return !(a == b); }

    bool is_zero() const {
        for (const auto& x : data_)
            if (!x.is_zero()) return false;
        return true;
    }

    // min entry valuation in pi-units; ring N when the matrix vanishes at precision
    int omega_pi() const {
        int best = ring_->N;
        for (const auto& x : data_) best = std::min(best, x.val_pi());
        return best;
    }
    Rat omega() const { return Rat(omega_pi(), ring_->e); }

    PAdicMatrix to_ring(const Ring& other) const {
        PAdicMatrix r(other, rows_, cols_);
        for (size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i].to_ring(other);
        return r;
    }
    PAdicMatrix div_exact_int(int64_t n) const {
        PAdicMatrix r(ring_, rows_, cols_);
        for (size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i].div_exact_int(n);
        return r;
    }

    // canonical key of the reduction mod pi^digits, for hashing quotient elements
    std::vector<int64_t> key_mod(int digits) const {
        std::vector<int64_t> key;
        key.reserve(data_.size() * digits);
        for (const auto& x : data_) {
            auto d = x.pi_digits();
            int64_t packed = 0;
            for (int j = std::min(digits, ring_->N) - 1; j >= 0; --j) packed = packed * ring_->p + d[j];
            key.push_back(packed);
        }
        return key;
    }

    std::string str() const {
        std::string s;
        for (int i = 0; i < rows_; ++i) {
            s += "[ ";
            for (int j = 0; j < cols_; ++j) s += at(i, j).str() + (j + 1 < cols_ ? ", " : "");
            s += " ]\n";
        }
        return s;
    }

  private:
    Ring ring_;
    int rows_ = 0, cols_ = 0;
    std::vector<PAdicScalar> data_;
};

PAdicMatrix matrix_log(const PAdicMatrix& a);
PAdicMatrix matrix_exp(const PAdicMatrix& x);

// inverse of a matrix of the form 1 + X with val_pi(X) >= 1, by geometric series
PAdicMatrix one_unit_inverse(const PAdicMatrix& a);

}  // namespace lazardlab
