#include <doctest.h>

#include <cmath>

#include "exsis/bounds.hpp"
#include "exsis/rng.hpp"

using namespace exsis;

namespace {

BoundInput base_input() {
    BoundInput input;
    input.n = 500;
    input.p = 2000;
    input.k = 4;
    input.beta_min = 0.5;
    input.beta_l2 = 1.0;
    input.sigma = 0.0;
    return input;
}

}  // namespace

TEST_CASE("d_general: exact rational examples") {
    BoundInput input = base_input();
    input.b = 0.05;
    auto result = d_general(input);
    REQUIRE(result.feasible());
    CHECK(*result.d_min == 5);  // ceil(2 / 0.4)

    // Noise term 4 sqrt(sigma^2 log p)/||beta||_2 = 0.1:
    // sigma chosen so the term is exactly 0.1 at p = 2000.
    input.sigma = 0.1 / (4.0 * std::sqrt(std::log(2000.0)));
    result = d_general(input);
    REQUIRE(result.feasible());
    CHECK(*result.d_min == 7);  // ceil(2 / 0.3)
}

TEST_CASE("d_general: zero denominator is infeasible, not an exception") {
    BoundInput input = base_input();
    input.b = 0.05;
    // MSR = 2b + noise exactly: 0.5 = 0.1 + 0.4.
    input.sigma = 0.4 / (4.0 * std::sqrt(std::log(2000.0)));
    const auto result = d_general(input);
    CHECK_FALSE(result.feasible());
    CHECK(result.infeasible_reason.find("MSR") != std::string::npos);
}

TEST_CASE("d_general: b outside (0, 1/sqrt(k)) is infeasible") {
    BoundInput input = base_input();
    input.b = 0.5;  // 1/sqrt(4) = 0.5, boundary is excluded
    CHECK_FALSE(d_general(input).feasible());
    input.b = 0.0;
    CHECK_FALSE(d_general(input).feasible());
    input.b.reset();
    CHECK_THROWS_AS(d_general(input), std::invalid_argument);
}

TEST_CASE("b_subgaussian: frozen value and precondition flag") {
    const auto [b, ok] = b_subgaussian(800, 1000, 1.0);
    // From scripts/derived_values.py.
    CHECK(b == doctest::Approx(0.262826088487847).epsilon(1e-12));
    // log 1000 = 6.9078 > 800/4096 = 0.1953, so the flag trips.
    CHECK_FALSE(ok);

    // b -> 0 as n grows with p fixed.
    const auto [b_big, ok_big] = b_subgaussian(100000000, 1000, 1.0);
    CHECK(ok_big);
    CHECK(b_big < 0.001);
    CHECK(b_big < b);
}

TEST_CASE("d_subgaussian composes b_subgaussian with the general bound") {
    BoundInput input;
    input.n = 100000;
    input.p = 2000;
    input.k = 4;
    input.beta_min = 0.5;
    input.beta_l2 = 1.0;
    input.subgauss_ratio = 1.0;
    const auto result = d_subgaussian(input);
    REQUIRE(result.feasible());

    const auto [b, ok] = b_subgaussian(input.n, input.p, 1.0);
    CHECK(ok);
    BoundInput general = input;
    general.b = b;
    CHECK(*result.d_min == *d_general(general).d_min);
    REQUIRE(result.success_probability.has_value());
    CHECK(*result.success_probability == doctest::Approx(1.0 - 2.0 * 6.0 / 2000.0));

    // Precondition-violation path still evaluates, with a warning.
    input.n = 500;
    const auto warned = d_subgaussian(input);
    CHECK_FALSE(warned.warnings.empty());
}

TEST_CASE("d_simple_n_over_logp: frozen values") {
    CHECK(d_simple_n_over_logp(500, 2000) == 66);
    CHECK(d_simple_n_over_logp(3000, 21345) == 301);
    CHECK(d_simple_n_over_logp(2, 8) == 1);  // n close to log p
}

TEST_CASE("d_mu_route: fallback, exact value, boundary infeasibility") {
    BoundInput input;
    input.n = 500;
    input.p = 2000;
    input.k = 9;
    input.mu = 0.1;
    input.beta_min = 0.8;
    input.beta_l2 = 1.0;
    input.sigma = 0.0;
    const auto result = d_mu_route(input);
    REQUIRE(result.feasible());
    CHECK(*result.d_min == 15);  // ceil(3 / (0.8 - 0.6))
    REQUIRE(result.fallback_d.has_value());
    CHECK(*result.fallback_d == 23);  // ceil(sqrt(500)), p >= 2n

    input.k = 10;  // k < 1/mu fails at equality
    const auto boundary = d_mu_route(input);
    CHECK_FALSE(boundary.feasible());
    CHECK(boundary.infeasible_reason.find("sparsity") != std::string::npos);
}

TEST_CASE("d_mu_route: mu -> 0 recovers ceil(sqrt(k)/MSR)") {
    BoundInput input;
    input.n = 100;
    input.p = 400;
    input.k = 4;
    input.mu = 0.0;
    input.beta_min = 0.31;
    input.beta_l2 = 1.0;
    const auto result = d_mu_route(input);
    REQUIRE(result.feasible());
    CHECK(*result.d_min == static_cast<Index>(std::ceil(2.0 / 0.31)));
}

TEST_CASE("d_coherence_route: sparsity cap, hard floor on p, limit case") {
    BoundInput input;
    input.n = 500;
    input.p = 22026;  // ~ e^10
    input.k = 4;
    input.mu = 0.01;
    input.beta_min = 0.45;
    input.beta_l2 = 1.0;
    input.c_mu = 14.14214;  // strictly above 10 sqrt(2)
    const auto result = d_coherence_route(input);
    // k-cap = mu^-2 / (c_mu^2 log p) = 10^4 / (200 * ~10) ~ 5.
    REQUIRE(result.preconditions.size() >= 3);
    const auto& cap = result.preconditions[2];
    CHECK(cap.rhs == doctest::Approx(5.0).epsilon(1e-4));
    CHECK(cap.holds);
    REQUIRE(result.feasible());
    CHECK(result.success_probability.has_value());
    CHECK(*result.success_probability == doctest::Approx(1.0 - 6.0 / 22026.0));
    REQUIRE(result.fallback_d.has_value());
    CHECK(*result.fallback_d == d_simple_n_over_logp(input.n, input.p));

    BoundInput small = input;
    small.p = 140;  // below exp(5) ~ 148.4
    small.n = 60;
    const auto hard = d_coherence_route(small);
    CHECK_FALSE(hard.feasible());
    CHECK(hard.infeasible_reason.find("exp(5)") != std::string::npos);

    // sigma = 0, mu -> 0: d -> ceil(sqrt(k)/MSR).
    BoundInput tiny = input;
    tiny.mu = 1e-9;
    const auto limit = d_coherence_route(tiny);
    REQUIRE(limit.feasible());
    CHECK(*limit.d_min == static_cast<Index>(std::ceil(2.0 / 0.45)));
}

TEST_CASE("monotonicity of d_general over randomized sweeps") {
    Rng rng(606);
    for (int trial = 0; trial < 500; ++trial) {
        BoundInput input;
        input.n = 200;
        input.p = 1000;
        input.k = 1 + static_cast<Index>(rng.below(6));
        input.beta_l2 = 1.0;
        const double root_k = std::sqrt(static_cast<double>(*input.k));
        input.beta_min = (0.55 + 0.45 * rng.uniform01()) / root_k;
        input.b = 0.1 * rng.uniform01() / root_k;
        input.sigma = 0.003 * rng.uniform01();
        const auto base = d_general(input);
        if (!base.feasible()) continue;

        BoundInput higher_msr = input;
        higher_msr.beta_min = std::min(*input.beta_min * 1.05, 1.0 / root_k);
        const auto up = d_general(higher_msr);
        if (up.feasible()) CHECK(*up.d_min <= *base.d_min);  // nonincreasing in MSR

        BoundInput more_b = input;
        more_b.b = *input.b + 0.01 / root_k;
        const auto worse = d_general(more_b);
        if (worse.feasible()) CHECK(*worse.d_min >= *base.d_min);

        BoundInput more_noise = input;
        more_noise.sigma = input.sigma + 0.002;
        const auto noisy = d_general(more_noise);
        if (noisy.feasible()) CHECK(*noisy.d_min >= *base.d_min);

        if (*input.k > 1) {
            // Same b and MSR with larger k: sqrt(k) numerator grows.
            BoundInput more_k = input;
            more_k.k = *input.k + 1;
            const auto sparser = d_general(more_k);
            if (sparser.feasible()) CHECK(*sparser.d_min >= *base.d_min);
        }
    }
}

TEST_CASE("route consistency: equal b gives identical d across routes") {
    BoundInput input;
    input.n = 4000;
    input.p = 9000;
    input.k = 3;
    input.beta_min = 0.5;
    input.beta_l2 = 1.0;
    input.sigma = 0.001;
    input.subgauss_ratio = 1.0;

    const auto sub = d_subgaussian(input);
    REQUIRE(sub.feasible());
    const auto [b_sub, ok] = b_subgaussian(input.n, input.p, 1.0);
    CHECK(ok);

    BoundInput general = input;
    general.b = b_sub;
    REQUIRE(d_general(general).feasible());
    CHECK(*d_general(general).d_min == *sub.d_min);

    // Coherence route with mu chosen so c_mu mu sqrt(log p) equals b_sub.
    BoundInput coherent = input;
    coherent.c_mu = 14.5;
    coherent.mu = b_sub / (coherent.c_mu * std::sqrt(std::log(static_cast<double>(input.p))));
    const auto via_mu_nu = d_coherence_route(coherent);
    REQUIRE(via_mu_nu.feasible());
    CHECK(*via_mu_nu.d_min == *sub.d_min);
}

TEST_CASE("corollary sufficiency: ceil(n/log p) dominates the slack-adjusted bound") {
    Rng rng(7777);
    int evaluated = 0;
    while (evaluated < 500) {
        const Index n = 100 + static_cast<Index>(rng.below(3000));
        const Index p = 2 * n + static_cast<Index>(rng.below(20000));
        const double lp = std::log(static_cast<double>(p));
        const Index k_max = static_cast<Index>(static_cast<double>(n) / lp);
        if (k_max < 1) continue;
        const Index k = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(k_max)));
        const double c1 = 2.0 + 3.0 * rng.uniform01();
        const double c2 = 2.0 + 3.0 * rng.uniform01();
        const double ratio = 1.0 + rng.uniform01();
        const double l2 = 0.5 + 2.0 * rng.uniform01();
        const double sigma = rng.uniform01() < 0.5 ? 0.0 : 0.01 * rng.uniform01();
        ++evaluated;

        // Slack-adjusted denominator of the k-free corollary proof.
        const double b = std::sqrt(8.0 * lp / static_cast<double>(n)) * ratio;
        const double denom = 2.0 * (c1 - 1.0) * b + 4.0 * (c2 - 1.0) * sigma * std::sqrt(lp) / l2;
        const Index d_slack = static_cast<Index>(
            std::ceil(std::sqrt(static_cast<double>(k)) / denom));
        CHECK(d_simple_n_over_logp(n, p) >= d_slack);
    }
}
