#pragma once

#include <string>
#include <utility>

#include "exsis/model_core.hpp"

namespace exsis {

// Default constant in the coherence property; the screening guarantees need
// anything strictly above this value.
inline double default_c_mu() { return 10.0 * std::sqrt(2.0); }

struct CoherenceReport {
    double mu = 0.0;     // worst-case coherence, max off-diagonal |Gram|
    double nu = 0.0;     // average coherence
    double welch = 0.0;  // dimension-only lower bound on mu (0 when p < n)
    std::pair<Index, Index> argmax_pair{0, 0};
};

// Exact max over off-diagonal Gram entries via blocked products; ties go to
// the lexicographically smallest (i, j) with i < j.
std::pair<double, std::pair<Index, Index>> worst_case_coherence(const DesignMatrix& X,
                                                                Index block = 256);

// (1/(p-1)) max_i |sum_{j != i} X_i' X_j|, computed in O(np) from the column
// sum: sum_{j != i} X_i' X_j = <X_i, s> - 1 with s = sum_j X_j.
double average_coherence(const DesignMatrix& X);

// sqrt((p-n)/(n(p-1))) for p >= n; zero when the bound is vacuous (p < n).
double welch_lower_bound(Index n, Index p);

CoherenceReport coherence_report(const DesignMatrix& X, Index block = 256);

struct CoherencePropertyVerdict {
    bool mu_ok = false;  // mu < 1/(c_mu sqrt(log p))
    bool nu_ok = false;  // nu < mu / sqrt(n)
    bool holds = false;
    double mu_threshold = 0.0;
    double nu_threshold = 0.0;
    double c_mu = 0.0;
    // Set when no unit-norm matrix of these dimensions can pass: the Welch
    // bound already exceeds the mu threshold.
    bool dimension_infeasible = false;
    std::string reason;
};

CoherencePropertyVerdict coherence_property_check(const CoherenceReport& report, Index n, Index p,
                                                  double c_mu = default_c_mu());

struct ScreeningConditionStats {
    double sc1 = 0.0;  // max over active i of |sum_{j in S*, j != i} X_i'X_j beta_j|
    double sc2 = 0.0;  // max over inactive i of |sum_{j in S*} X_i'X_j beta_j|
    double b_effective = 0.0;  // max(sc1, sc2) / ||beta||_2
    bool feasible = false;     // b_effective * sqrt(k) < 1, strict
};

// Exact screening-condition maxima; needs the ground-truth support, so this
// is for synthetic instances only.
ScreeningConditionStats screening_condition_stats(const DesignMatrix& X, const SparseModel& model);

}  // namespace exsis
