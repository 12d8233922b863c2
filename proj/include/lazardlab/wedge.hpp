#pragma once

#include <map>
#include <vector>

#include "lazardlab/common.hpp"

namespace lazardlab {

// basis bookkeeping for exterior powers: increasing index tuples with one
// fixed Koszul sign convention shared by every consumer
class WedgeBasis {
  public:
    WedgeBasis(int rank, int top) : rank_(rank) {
        tuples_.resize(top + 1);
        for (int q = 0; q <= top; ++q) {
            std::vector<int> cur(q);
            build(q, 0, 0, cur);
        }
        for (int q = 0; q <= top; ++q)
            for (size_t t = 0; t < tuples_[q].size(); ++t) index_[tuples_[q][t]] = static_cast<int>(t);
    }

    int rank() const { return rank_; }
    int dim(int q) const { return q < static_cast<int>(tuples_.size()) ? static_cast<int>(tuples_[q].size()) : 0; }
    const std::vector<std::vector<int>>& tuples(int q) const { return tuples_[q]; }
    int index_of(const std::vector<int>& t) const { return index_.at(t); }

    // sort an arbitrary tuple into increasing order; returns the permutation
    // sign, or 0 when two entries coincide
    static int sort_sign(std::vector<int>& t) {
        int sign = 1;
        for (size_t i = 0; i < t.size(); ++i)
            for (size_t j = i + 1; j < t.size(); ++j) {
                if (t[i] == t[j]) return 0;
                if (t[i] > t[j]) {
                    std::swap(t[i], t[j]);
                    sign = -sign;
                }
            }
        return sign;
    }

  private:
    void build(int q, int start, int depth, std::vector<int>& cur) {
        if (depth == q) {
            tuples_[q].push_back(cur);
            return;
        }
        for (int i = start; i <= rank_ - (q - depth); ++i) {
            cur[depth] = i;
            build(q, i + 1, depth + 1, cur);
        }
    }

    int rank_;
    std::vector<std::vector<std::vector<int>>> tuples_;
    std::map<std::vector<int>, int> index_;
};

}  // namespace lazardlab
