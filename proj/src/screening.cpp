#include "exsis/screening.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace exsis {

ScreeningOutcome screen_top_d(const Vector& w, Index d) {
    const Index p = w.size();
    if (d < 1 || d > p) throw std::invalid_argument("screen_top_d: need 1 <= d <= p");

    std::vector<Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Index{0});
    // Strict total order: larger magnitude first, smaller index on ties.
    const auto before = [&w](Index a, Index b) {
        const double va = std::abs(w[a]);
        const double vb = std::abs(w[b]);
        if (va != vb) return va > vb;
        return a < b;
    };
    if (d < p) std::nth_element(order.begin(), order.begin() + (d - 1), order.end(), before);

    ScreeningOutcome out;
    out.d = d;
    out.selected.assign(order.begin(), order.begin() + d);
    std::sort(out.selected.begin(), out.selected.end());
    out.threshold_value = std::abs(w[order[static_cast<std::size_t>(d - 1)]]);
    out.tie_broken = false;
    for (auto it = order.begin() + d; it != order.end(); ++it) {
        if (std::abs(w[*it]) == out.threshold_value) {
            out.tie_broken = true;
            break;
        }
    }
    return out;
}

Index minimum_model_size(const Vector& w, std::span<const Index> support) {
    if (support.empty()) throw std::invalid_argument("minimum_model_size: empty support");
    double weakest = std::numeric_limits<double>::infinity();
    for (Index i : support) {
        if (i < 0 || i >= w.size())
            throw std::invalid_argument("minimum_model_size: support index out of range");
        weakest = std::min(weakest, std::abs(w[i]));
    }
    Index count = 0;
    for (Index j = 0; j < w.size(); ++j)
        if (std::abs(w[j]) >= weakest) ++count;
    return count;
}

double detection_rate(std::span<const Index> selected, std::span<const Index> support) {
    if (support.empty()) throw std::invalid_argument("detection_rate: empty support");
    std::vector<Index> sel(selected.begin(), selected.end());
    std::sort(sel.begin(), sel.end());
    Index hits = 0;
    for (Index i : support)
        if (std::binary_search(sel.begin(), sel.end(), i)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(support.size());
}

IterativeTrace tbar_trace(Index k, double beta_l1, double beta_l2, double beta_min, double b,
                          double sigma, Index p) {
    if (k < 1 || p < 1) throw std::invalid_argument("tbar_trace: need k >= 1 and p >= 1");
    if (beta_l2 <= 0 || beta_min <= 0)
        throw std::invalid_argument("tbar_trace: beta norms must be positive");

    const double noise = std::sqrt(sigma * sigma * std::log(static_cast<double>(p)));
    const double msr = beta_min / beta_l2;
    const double condition = 2.0 * b + 4.0 * noise / beta_l2;
    if (msr <= condition)
        throw std::invalid_argument("tbar_trace: MSR condition violated, beta_min/||beta||_2 = " +
                                    std::to_string(msr) + " <= " + std::to_string(condition));

    // One-shot stopping level from the theorem denominator.
    const double stop = std::sqrt(static_cast<double>(k)) / (msr - condition);
    const double denom = beta_min - b * beta_l2 - 2.0 * noise;

    IterativeTrace trace;
    Index prev = p;
    constexpr Index kMaxIterations = 1000000;
    for (Index iter = 0; iter < kMaxIterations; ++iter) {
        if (static_cast<double>(prev) <= stop) {
            trace.terminated = true;
            break;
        }
        const double tbar =
            (static_cast<double>(prev) * b * beta_l2 + beta_l1 + 2.0 * static_cast<double>(prev) * noise) /
            denom;
        Index next = static_cast<Index>(std::ceil(tbar));
        if (next >= prev) {
            // tbar < p_{i-1} holds while p_{i-1} > stop, and the bounded
            // count is an integer, so it is at most p_{i-1} - 1 even when
            // the ceiling lands back on p_{i-1}.
            next = prev - 1;
        }
        trace.tbar_sequence.push_back(tbar);
        trace.p_sequence.push_back(next);
        prev = next;
    }
    if (!trace.terminated)
        throw std::runtime_error("tbar_trace: iteration cap reached without termination");
    trace.final_d = trace.p_sequence.empty() ? p : trace.p_sequence.back();
    return trace;
}

}  // namespace exsis
