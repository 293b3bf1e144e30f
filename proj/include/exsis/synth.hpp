#pragma once

#include <cstdint>
#include <optional>

#include "exsis/model_core.hpp"

namespace exsis {

enum class DesignFamily { gaussian, uniform, rademacher, equicorrelated_gaussian };

struct DesignSpec {
    DesignFamily family = DesignFamily::gaussian;
    Index n = 0;
    Index p = 0;
    double rho = 0.0;  // pairwise correlation, equicorrelated family only
    std::optional<Vector> per_column_scale;
};

// Pre-normalization draw. The equicorrelated family uses a single shared
// factor, X_j = sqrt(1-rho) Z_j + sqrt(rho) Z_0, whose population pairwise
// correlation is exactly rho. Entries are generated column by column, so the
// result is a pure function of (spec, seed).
Matrix generate_design_raw(const DesignSpec& spec, std::uint64_t seed);

// Raw draw followed by column normalization.
DesignMatrix generate_design(const DesignSpec& spec, std::uint64_t seed);

// Support uniform over k-subsets (Floyd sampling); nonzero values iid
// U[a, e], all positive.
SparseModel generate_beta_uniform(Index p, Index k, double a, double e, double sigma,
                                  std::uint64_t seed);

// Nonzero values |z| + 2 with z standard normal, so every coefficient is >= 2.
SparseModel generate_beta_shifted(Index p, Index k, double sigma, std::uint64_t seed);

// Raises the worst-case coherence of a design by scaling its largest
// singular value by gamma >= 1 and re-normalizing the columns. The scaled
// matrix is X + (gamma - 1) s1 u1 v1', a rank-one move along the top
// singular pair, and its normalized Gram is
//   (G + (gamma^2 - 1) s1^2 v1 v1') / (d d')  with  d_i^2 = 1 + (gamma^2 - 1) s1^2 v1_i^2,
// which is what mu_at evaluates without forming the matrix.
class CoherenceAdjuster {
  public:
    explicit CoherenceAdjuster(const DesignMatrix& X);

    double base_mu() const { return base_mu_; }

    double mu_at(double gamma) const;

    struct Solution {
        double gamma = 1.0;
        double mu = 0.0;
    };

    // Monotone bisection on gamma in [1, 1e4] until mu lands within
    // tolerance of the target.
    Solution solve(double target_mu, double tolerance, int max_iterations = 200) const;

    DesignMatrix materialize(double gamma) const;

    // X'^T X'_S beta_S on the adjusted, column-normalized matrix: the
    // noiseless marginal correlations, computed from the Gram update.
    Vector noiseless_correlations(double gamma, const SparseModel& model) const;

  private:
    Matrix base_;       // original unit-column matrix
    Matrix gram_;       // base_^T base_
    Vector u1_;         // top left singular vector
    Vector v1_;         // top right singular vector
    double s1_ = 0.0;   // top singular value
    double base_mu_ = 0.0;
};

// One-shot wrapper around CoherenceAdjuster::solve + materialize.
DesignMatrix adjust_coherence(const DesignMatrix& X, double target_mu, double tolerance);

}  // namespace exsis
