#pragma once

#include <optional>
#include <string>
#include <vector>

#include "exsis/coherence.hpp"
#include "exsis/model_core.hpp"

namespace exsis {

// Inputs shared by the screened-model-size calculators. Only the fields a
// given route reads need to be set; a missing required field is an error,
// while a failed precondition makes the result infeasible (a value, not an
// exception, so parameter sweeps can tabulate infeasible regimes).
struct BoundInput {
    Index n = 0;
    Index p = 0;
    std::optional<Index> k;
    std::optional<double> beta_min;
    std::optional<double> beta_l2;
    double sigma = 0.0;
    std::optional<double> b;      // screening parameter (general route)
    double subgauss_ratio = 1.0;  // b*/sigma* >= 1
    std::optional<double> mu;     // worst-case coherence
    double c_mu = default_c_mu();
    double c1 = 2.5;  // slack constants of the k-free corollaries
    double c2 = 2.5;
};

struct Precondition {
    std::string name;
    bool holds = false;
    double lhs = 0.0;
    double rhs = 0.0;
};

enum class BoundRoute { general, subgaussian, mu, coherence };

struct BoundResult {
    std::optional<Index> d_min;  // empty = infeasible
    BoundRoute route = BoundRoute::general;
    std::vector<Precondition> preconditions;
    std::vector<std::string> warnings;
    std::optional<double> success_probability;
    std::optional<Index> fallback_d;  // k-free corollary value, when applicable
    std::string infeasible_reason;

    bool feasible() const { return d_min.has_value(); }
};

// d = ceil(sqrt(k) / (MSR - 2b - 4 sqrt(sigma^2 log p)/||beta||_2)), with the
// screening parameter b supplied by the caller.
BoundResult d_general(const BoundInput& input);

// Screening parameter for column-normalized sub-Gaussian designs,
// b = sqrt(8 log p / n) * (b*/sigma*), plus the flag for its
// log p <= (n/16) (sigma*/(4 b*))^4 precondition.
std::pair<double, bool> b_subgaussian(Index n, Index p, double subgauss_ratio);

BoundResult d_subgaussian(const BoundInput& input);

// ceil(n / log p), the k-free screened size shared by both corollaries.
Index d_simple_n_over_logp(Index n, Index p);

// Worst-case-coherence route, b = mu sqrt(k), requires k < 1/mu.
BoundResult d_mu_route(const BoundInput& input);

// Coherence-property route, b = c_mu mu sqrt(log p); requires
// c_mu > 10 sqrt(2), p >= max(2n, e^5) and k < mu^-2/(c_mu^2 log p).
BoundResult d_coherence_route(const BoundInput& input);

}  // namespace exsis
