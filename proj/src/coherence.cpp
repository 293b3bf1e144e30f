#include "exsis/coherence.hpp"

#include <algorithm>
#include <cmath>

namespace exsis {

std::pair<double, std::pair<Index, Index>> worst_case_coherence(const DesignMatrix& X,
                                                                Index block) {
    const Index p = X.p();
    if (p < 2) throw std::invalid_argument("worst_case_coherence: need p >= 2");
    if (block < 1) block = 256;

    double best = -1.0;
    std::pair<Index, Index> pair{0, 1};
    // Upper triangle in column blocks: memory stays O(n*block + block^2).
    for (Index j0 = 0; j0 < p; j0 += block) {
        const Index jw = std::min(block, p - j0);
        for (Index i0 = 0; i0 <= j0; i0 += block) {
            const Index iw = std::min(block, p - i0);
            const Matrix g = X.data().middleCols(i0, iw).transpose() * X.data().middleCols(j0, jw);
            for (Index jj = 0; jj < jw; ++jj) {
                const Index j = j0 + jj;
                const Index ihi = std::min(iw, j - i0);
                for (Index ii = 0; ii < ihi; ++ii) {
                    const double v = std::abs(g(ii, jj));
                    const Index i = i0 + ii;
                    if (v > best || (v == best && std::pair{i, j} < pair)) {
                        best = v;
                        pair = {i, j};
                    }
                }
            }
        }
    }
    return {best, pair};
}

double average_coherence(const DesignMatrix& X) {
    const Index p = X.p();
    if (p < 2) throw std::invalid_argument("average_coherence: need p >= 2");
    const Vector s = X.data().rowwise().sum();
    const Vector dots = X.data().transpose() * s;
    double worst = 0.0;
    for (Index i = 0; i < p; ++i) worst = std::max(worst, std::abs(dots[i] - 1.0));
    return worst / static_cast<double>(p - 1);
}

double welch_lower_bound(Index n, Index p) {
    if (n < 1 || p < 2) throw std::invalid_argument("welch_lower_bound: need n >= 1, p >= 2");
    if (p < n) return 0.0;
    const double nn = static_cast<double>(n);
    const double pp = static_cast<double>(p);
    return std::sqrt((pp - nn) / (nn * (pp - 1.0)));
}

CoherenceReport coherence_report(const DesignMatrix& X, Index block) {
    CoherenceReport r;
    auto [mu, pair] = worst_case_coherence(X, block);
    r.mu = mu;
    r.argmax_pair = pair;
    r.nu = average_coherence(X);
    r.welch = welch_lower_bound(X.n(), X.p());
    return r;
}

CoherencePropertyVerdict coherence_property_check(const CoherenceReport& report, Index n, Index p,
                                                  double c_mu) {
    if (c_mu <= 0) throw std::invalid_argument("coherence_property_check: c_mu must be positive");
    if (p < 2) throw std::invalid_argument("coherence_property_check: need p >= 2");
    CoherencePropertyVerdict v;
    v.c_mu = c_mu;
    v.mu_threshold = 1.0 / (c_mu * std::sqrt(std::log(static_cast<double>(p))));
    v.nu_threshold = report.mu / std::sqrt(static_cast<double>(n));
    v.mu_ok = report.mu < v.mu_threshold;
    v.nu_ok = report.nu < v.nu_threshold;
    v.holds = v.mu_ok && v.nu_ok;
    const double welch = welch_lower_bound(n, p);
    if (p >= n && welch >= v.mu_threshold) {
        v.dimension_infeasible = true;
        v.reason = "no unit-norm matrix of these dimensions can satisfy the property: "
                   "Welch bound " +
                   std::to_string(welch) + " >= mu threshold " + std::to_string(v.mu_threshold);
    }
    return v;
}

ScreeningConditionStats screening_condition_stats(const DesignMatrix& X, const SparseModel& model) {
    if (model.support.empty())
        throw std::invalid_argument("screening_condition_stats: empty support");
    if (model.p() != X.p())
        throw std::invalid_argument("screening_condition_stats: dimension mismatch");

    // xi = X^T (X_S beta_S); for active i the self term beta_i is removed.
    Vector signal = Vector::Zero(X.n());
    for (Index j : model.support) signal += model.beta[j] * X.column(j);
    const Vector xi = X.data().transpose() * signal;

    ScreeningConditionStats stats;
    std::vector<bool> active(static_cast<std::size_t>(X.p()), false);
    for (Index j : model.support) active[static_cast<std::size_t>(j)] = true;
    for (Index i = 0; i < X.p(); ++i) {
        if (active[static_cast<std::size_t>(i)])
            stats.sc1 = std::max(stats.sc1, std::abs(xi[i] - model.beta[i]));
        else
            stats.sc2 = std::max(stats.sc2, std::abs(xi[i]));
    }
    stats.b_effective = std::max(stats.sc1, stats.sc2) / model.beta_l2();
    stats.feasible = stats.b_effective * std::sqrt(static_cast<double>(model.k())) < 1.0;
    return stats;
}

}  // namespace exsis
