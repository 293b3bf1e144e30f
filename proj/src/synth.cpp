#include "exsis/synth.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "exsis/rng.hpp"

namespace exsis {

Matrix generate_design_raw(const DesignSpec& spec, std::uint64_t seed) {
    if (spec.n < 1 || spec.p < 1) throw std::invalid_argument("generate_design_raw: n, p >= 1");
    if (spec.rho < 0.0 || spec.rho >= 1.0)
        throw std::invalid_argument("generate_design_raw: rho must be in [0, 1)");
    if (spec.per_column_scale &&
        (spec.per_column_scale->size() != spec.p || (spec.per_column_scale->array() <= 0).any()))
        throw std::invalid_argument("generate_design_raw: bad per-column scales");

    Rng rng(seed);
    Matrix m(spec.n, spec.p);
    switch (spec.family) {
        case DesignFamily::gaussian:
            for (Index j = 0; j < spec.p; ++j)
                for (Index i = 0; i < spec.n; ++i) m(i, j) = rng.normal();
            break;
        case DesignFamily::uniform:
            for (Index j = 0; j < spec.p; ++j)
                for (Index i = 0; i < spec.n; ++i) m(i, j) = rng.uniform(-1.0, 1.0);
            break;
        case DesignFamily::rademacher:
            for (Index j = 0; j < spec.p; ++j)
                for (Index i = 0; i < spec.n; ++i) m(i, j) = (rng.next_u64() & 1u) ? 1.0 : -1.0;
            break;
        case DesignFamily::equicorrelated_gaussian: {
            Vector shared(spec.n);
            for (Index i = 0; i < spec.n; ++i) shared[i] = rng.normal();
            const double w_own = std::sqrt(1.0 - spec.rho);
            const double w_shared = std::sqrt(spec.rho);
            for (Index j = 0; j < spec.p; ++j)
                for (Index i = 0; i < spec.n; ++i)
                    m(i, j) = w_own * rng.normal() + w_shared * shared[i];
            break;
        }
    }
    if (spec.per_column_scale)
        for (Index j = 0; j < spec.p; ++j) m.col(j) *= (*spec.per_column_scale)[j];
    return m;
}

DesignMatrix generate_design(const DesignSpec& spec, std::uint64_t seed) {
    return normalize_columns(generate_design_raw(spec, seed));
}

SparseModel generate_beta_uniform(Index p, Index k, double a, double e, double sigma,
                                  std::uint64_t seed) {
    if (!(0.0 < a && a < e)) throw std::invalid_argument("generate_beta_uniform: need 0 < a < e");
    if (k < 1 || k >= p) throw std::invalid_argument("generate_beta_uniform: need 1 <= k < p");
    Rng rng(seed);
    auto support = sample_k_subset(rng, static_cast<long>(p), static_cast<long>(k));
    std::vector<double> values(static_cast<std::size_t>(k));
    for (auto& v : values) v = rng.uniform(a, e);
    return SparseModel::make(p, std::vector<Index>(support.begin(), support.end()), values, sigma);
}

SparseModel generate_beta_shifted(Index p, Index k, double sigma, std::uint64_t seed) {
    if (k < 1 || k >= p) throw std::invalid_argument("generate_beta_shifted: need 1 <= k < p");
    Rng rng(seed);
    auto support = sample_k_subset(rng, static_cast<long>(p), static_cast<long>(k));
    std::vector<double> values(static_cast<std::size_t>(k));
    for (auto& v : values) v = std::abs(rng.normal()) + 2.0;
    return SparseModel::make(p, std::vector<Index>(support.begin(), support.end()), values, sigma);
}

CoherenceAdjuster::CoherenceAdjuster(const DesignMatrix& X) : base_(X.data()) {
    gram_.noalias() = base_.transpose() * base_;

    // Top singular pair via the n x n outer Gram, cheap for n << p.
    Matrix outer = base_ * base_.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(outer);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("CoherenceAdjuster: eigendecomposition failed");
    const Index last = outer.rows() - 1;
    s1_ = std::sqrt(std::max(0.0, eig.eigenvalues()[last]));
    u1_ = eig.eigenvectors().col(last);
    v1_ = base_.transpose() * u1_ / s1_;

    base_mu_ = 0.0;
    for (Index j = 1; j < gram_.cols(); ++j)
        for (Index i = 0; i < j; ++i) base_mu_ = std::max(base_mu_, std::abs(gram_(i, j)));
}

double CoherenceAdjuster::mu_at(double gamma) const {
    if (gamma < 1.0) throw std::invalid_argument("CoherenceAdjuster: gamma must be >= 1");
    const Index p = gram_.cols();
    const double c = (gamma * gamma - 1.0) * s1_ * s1_;
    Vector inv_norm(p), bump(p);
    for (Index i = 0; i < p; ++i) {
        inv_norm[i] = 1.0 / std::sqrt(1.0 + c * v1_[i] * v1_[i]);
        bump[i] = std::sqrt(c) * v1_[i] * inv_norm[i];
    }
    double mu = 0.0;
    for (Index j = 1; j < p; ++j) {
        const double aj = inv_norm[j];
        const double bj = bump[j];
        for (Index i = 0; i < j; ++i) {
            const double v = std::abs(gram_(i, j) * inv_norm[i] * aj + bump[i] * bj);
            if (v > mu) mu = v;
        }
    }
    return mu;
}

CoherenceAdjuster::Solution CoherenceAdjuster::solve(double target_mu, double tolerance,
                                                     int max_iterations) const {
    if (tolerance <= 0) throw std::invalid_argument("CoherenceAdjuster: tolerance must be positive");
    if (target_mu >= 1.0) throw std::invalid_argument("CoherenceAdjuster: target_mu must be < 1");
    if (target_mu < base_mu_ - tolerance)
        throw std::invalid_argument("CoherenceAdjuster: target below the base coherence " +
                                    std::to_string(base_mu_));
    if (std::abs(base_mu_ - target_mu) <= tolerance) return {1.0, base_mu_};

    constexpr double kGammaCap = 1e4;
    double lo = 1.0;
    double lo_mu = base_mu_;
    double hi = 2.0;
    double hi_mu = mu_at(hi);
    int used = 0;
    while (hi_mu < target_mu && hi < kGammaCap && used < max_iterations) {
        lo = hi;
        lo_mu = hi_mu;
        hi = std::min(hi * 2.0, kGammaCap);
        hi_mu = mu_at(hi);
        ++used;
    }
    if (std::abs(hi_mu - target_mu) <= tolerance) return {hi, hi_mu};
    if (hi_mu < target_mu)
        throw std::runtime_error("adjust_coherence: target " + std::to_string(target_mu) +
                                 " unreachable; achieved range [" + std::to_string(base_mu_) +
                                 ", " + std::to_string(hi_mu) + "]");

    for (; used < max_iterations; ++used) {
        const double mid = 0.5 * (lo + hi);
        const double mid_mu = mu_at(mid);
        if (std::abs(mid_mu - target_mu) <= tolerance) return {mid, mid_mu};
        if (mid_mu < target_mu) {
            lo = mid;
            lo_mu = mid_mu;
        } else {
            hi = mid;
            hi_mu = mid_mu;
        }
    }
    throw std::runtime_error("adjust_coherence: bisection did not land within tolerance; "
                             "achieved range [" +
                             std::to_string(lo_mu) + ", " + std::to_string(hi_mu) + "]");
}

DesignMatrix CoherenceAdjuster::materialize(double gamma) const {
    if (gamma == 1.0) return DesignMatrix::from_unit_columns(base_);
    Matrix scaled = base_ + (gamma - 1.0) * s1_ * (u1_ * v1_.transpose());
    return normalize_columns(scaled);
}

Vector CoherenceAdjuster::noiseless_correlations(double gamma, const SparseModel& model) const {
    if (model.p() != gram_.cols())
        throw std::invalid_argument("noiseless_correlations: dimension mismatch");
    const Index p = gram_.cols();
    const double c = (gamma * gamma - 1.0) * s1_ * s1_;
    Vector inv_norm(p);
    for (Index i = 0; i < p; ++i) inv_norm[i] = 1.0 / std::sqrt(1.0 + c * v1_[i] * v1_[i]);
    double shared = 0.0;  // sum_j v1_j beta_j / d_j
    Vector w = Vector::Zero(p);
    for (Index j : model.support) {
        const double scaled_beta = model.beta[j] * inv_norm[j];
        w += gram_.col(j) * scaled_beta;
        shared += v1_[j] * scaled_beta;
    }
    for (Index i = 0; i < p; ++i) w[i] = (w[i] + c * v1_[i] * shared) * inv_norm[i];
    return w;
}

DesignMatrix adjust_coherence(const DesignMatrix& X, double target_mu, double tolerance) {
    CoherenceAdjuster adjuster(X);
    if (target_mu < adjuster.base_mu())
        throw std::invalid_argument("adjust_coherence: target_mu " + std::to_string(target_mu) +
                                    " is below the base coherence " +
                                    std::to_string(adjuster.base_mu()));
    const auto sol = adjuster.solve(target_mu, tolerance);
    return adjuster.materialize(sol.gamma);
}

}  // namespace exsis
