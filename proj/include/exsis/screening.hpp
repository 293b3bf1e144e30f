#pragma once

#include <span>
#include <vector>

#include "exsis/model_core.hpp"

namespace exsis {

struct ScreeningOutcome {
    std::vector<Index> selected;  // sorted, |selected| == d
    Index d = 0;
    double threshold_value = 0.0;  // d-th largest |w_i|
    bool tie_broken = false;       // an unselected index shares the threshold value
};

// Keeps the d indices with the largest |w_i|. Ties at the boundary go to the
// smaller index. O(p) selection (nth_element on an index permutation), no
// full sort.
ScreeningOutcome screen_top_d(const Vector& w, Index d);

// Smallest d that guarantees support ⊆ selected under any tie-breaking:
// the number of j with |w_j| >= the weakest active |w_i|.
Index minimum_model_size(const Vector& w, std::span<const Index> support);

// |support ∩ selected| / |support|.
double detection_rate(std::span<const Index> selected, std::span<const Index> support);

// Diagnostic replay of the sub-model recursion behind the one-shot d bound:
//   tbar_i = (p_{i-1} b ||b||_2 + ||b||_1 + 2 p_{i-1} sqrt(sigma^2 log p))
//            / (beta_min - b ||b||_2 - 2 sqrt(sigma^2 log p)),
// iterated with p_i = ceil(tbar_i) until p_i falls to the one-shot bound.
struct IterativeTrace {
    std::vector<double> tbar_sequence;
    std::vector<Index> p_sequence;  // strictly decreasing while iterating
    bool terminated = false;
    Index final_d = 0;
};

IterativeTrace tbar_trace(Index k, double beta_l1, double beta_l2, double beta_min, double b,
                          double sigma, Index p);

}  // namespace exsis
