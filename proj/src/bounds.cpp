#include "exsis/bounds.hpp"

#include <cmath>

namespace exsis {

namespace {

constexpr double kDenominatorFloor = 1e-12;

double log_p(const BoundInput& input) {
    return std::log(static_cast<double>(input.p));
}

double noise_term(const BoundInput& input) {
    // 4 sqrt(sigma^2 log p) / ||beta||_2; zero noise contributes nothing and
    // needs no beta_l2.
    if (input.sigma == 0.0) return 0.0;
    if (!input.beta_l2) throw std::invalid_argument("bounds: beta_l2 required when sigma > 0");
    return 4.0 * std::sqrt(input.sigma * input.sigma * log_p(input)) / *input.beta_l2;
}

double msr_of(const BoundInput& input) {
    if (!input.beta_min || !input.beta_l2)
        throw std::invalid_argument("bounds: beta_min and beta_l2 required");
    return *input.beta_min / *input.beta_l2;
}

// Shared denominator logic: d = ceil(sqrt(k) / (msr - 2b - noise)).
void finish_with_b(BoundResult& result, const BoundInput& input, double b) {
    if (!input.k) throw std::invalid_argument("bounds: k required for this route");
    const double k = static_cast<double>(*input.k);
    const double msr = msr_of(input);
    const double noise = noise_term(input);
    const double denom = msr - 2.0 * b - noise;
    result.preconditions.push_back(
        {"MSR > 2b + 4 sqrt(sigma^2 log p)/||beta||_2", denom > kDenominatorFloor, msr,
         2.0 * b + noise});
    if (denom <= kDenominatorFloor) {
        result.d_min.reset();
        result.infeasible_reason = "MSR deficit: " + std::to_string(msr) + " <= " +
                                   std::to_string(2.0 * b + noise);
        return;
    }
    result.d_min = ceil_index(std::sqrt(k) / denom);
}

}  // namespace

BoundResult d_general(const BoundInput& input) {
    BoundResult result;
    result.route = BoundRoute::general;
    if (!input.k) throw std::invalid_argument("d_general: k required");
    if (!input.b) throw std::invalid_argument("d_general: screening parameter b required");
    const double root_k = std::sqrt(static_cast<double>(*input.k));
    result.preconditions.push_back(
        {"0 < b < 1/sqrt(k)", *input.b > 0.0 && *input.b * root_k < 1.0, *input.b, 1.0 / root_k});
    if (!result.preconditions.back().holds) {
        result.infeasible_reason = "screening parameter outside (0, 1/sqrt(k))";
        return result;
    }
    finish_with_b(result, input, *input.b);
    return result;
}

std::pair<double, bool> b_subgaussian(Index n, Index p, double subgauss_ratio) {
    if (n < 2 || p < 2) throw std::invalid_argument("b_subgaussian: need n, p >= 2");
    if (subgauss_ratio < 1.0)
        throw std::invalid_argument("b_subgaussian: ratio b*/sigma* is >= 1 for sub-Gaussians");
    const double lp = std::log(static_cast<double>(p));
    const double b = std::sqrt(8.0 * lp / static_cast<double>(n)) * subgauss_ratio;
    const double cap = (static_cast<double>(n) / 16.0) * std::pow(1.0 / (4.0 * subgauss_ratio), 4);
    return {b, lp <= cap};
}

BoundResult d_subgaussian(const BoundInput& input) {
    BoundResult result;
    result.route = BoundRoute::subgaussian;
    auto [b, logp_ok] = b_subgaussian(input.n, input.p, input.subgauss_ratio);
    const double cap =
        (static_cast<double>(input.n) / 16.0) * std::pow(1.0 / (4.0 * input.subgauss_ratio), 4);
    result.preconditions.push_back({"log p <= (n/16)(sigma*/(4 b*))^4", logp_ok, log_p(input), cap});
    if (!logp_ok)
        result.warnings.push_back("log p exceeds the sub-Gaussian cap; the bound is evaluated "
                                  "anyway but the guarantee does not apply");
    finish_with_b(result, input, b);
    if (result.d_min && input.k) {
        result.success_probability =
            1.0 - 2.0 * static_cast<double>(*input.k + 2) / static_cast<double>(input.p);
        if (static_cast<double>(*input.k) <= static_cast<double>(input.n) / log_p(input))
            result.fallback_d = d_simple_n_over_logp(input.n, input.p);
    }
    return result;
}

Index d_simple_n_over_logp(Index n, Index p) {
    if (p < 2) throw std::invalid_argument("d_simple_n_over_logp: need p >= 2");
    return ceil_index(static_cast<double>(n) / std::log(static_cast<double>(p)));
}

BoundResult d_mu_route(const BoundInput& input) {
    BoundResult result;
    result.route = BoundRoute::mu;
    if (!input.mu) throw std::invalid_argument("d_mu_route: mu required");
    if (!input.k) throw std::invalid_argument("d_mu_route: k required");
    const double mu = *input.mu;
    const double k = static_cast<double>(*input.k);
    result.preconditions.push_back({"k < 1/mu", mu > 0.0 ? k < 1.0 / mu : true, k,
                                    mu > 0.0 ? 1.0 / mu : std::numeric_limits<double>::infinity()});
    if (input.p >= 2 * input.n) result.fallback_d = ceil_index(std::sqrt(static_cast<double>(input.n)));
    if (!result.preconditions.front().holds) {
        result.infeasible_reason = "sparsity deficit: k >= 1/mu";
        return result;
    }
    finish_with_b(result, input, mu * std::sqrt(k));
    if (result.d_min) {
        const double p = static_cast<double>(input.p);
        result.success_probability =
            1.0 - 2.0 / (p * std::sqrt(2.0 * M_PI * std::log(p)));
    }
    return result;
}

BoundResult d_coherence_route(const BoundInput& input) {
    BoundResult result;
    result.route = BoundRoute::coherence;
    if (!input.mu) throw std::invalid_argument("d_coherence_route: mu required");
    if (!input.k) throw std::invalid_argument("d_coherence_route: k required");
    const double mu = *input.mu;
    const double k = static_cast<double>(*input.k);
    const double lp = log_p(input);
    const double p = static_cast<double>(input.p);
    const double n = static_cast<double>(input.n);

    result.preconditions.push_back(
        {"c_mu > 10 sqrt(2)", input.c_mu > 10.0 * std::sqrt(2.0), input.c_mu, 10.0 * std::sqrt(2.0)});
    const double p_floor = std::max(2.0 * n, std::exp(5.0));
    result.preconditions.push_back({"p >= max{2n, exp(5)}", p >= p_floor, p, p_floor});
    const double k_cap = mu > 0.0 ? 1.0 / (mu * mu * input.c_mu * input.c_mu * lp)
                                  : std::numeric_limits<double>::infinity();
    result.preconditions.push_back({"k < mu^-2/(c_mu^2 log p)", k < k_cap, k, k_cap});

    if (p >= p_floor) result.fallback_d = d_simple_n_over_logp(input.n, input.p);

    for (const auto& pre : result.preconditions) {
        if (!pre.holds) {
            result.infeasible_reason = pre.name + " fails: " + std::to_string(pre.lhs) +
                                       " vs " + std::to_string(pre.rhs);
            return result;
        }
    }
    finish_with_b(result, input, input.c_mu * mu * std::sqrt(lp));
    if (result.d_min) result.success_probability = 1.0 - 6.0 / p;
    return result;
}

}  // namespace exsis
