#pragma once

#include <vector>

#include "exsis/model_core.hpp"

namespace exsis {

enum class PenaltyKind { lasso, elastic_net };

// (lambda1, lambda2) = (alpha*lambda, (1-alpha)*lambda); alpha = 1 is the
// lasso. The quadratic part enters the objective as 0.5*lambda2*||beta||_2^2.
struct PenaltySpec {
    PenaltyKind kind = PenaltyKind::lasso;
    double lambda = 0.0;
    double alpha = 1.0;

    double lambda1() const { return alpha * lambda; }
    double lambda2() const { return (1.0 - alpha) * lambda; }

    static PenaltySpec lasso(double lambda) { return {PenaltyKind::lasso, lambda, 1.0}; }
    static PenaltySpec elastic_net(double lambda, double alpha) {
        if (alpha <= 0.0 || alpha > 1.0)
            throw std::invalid_argument("PenaltySpec: alpha must be in (0, 1]");
        return {alpha == 1.0 ? PenaltyKind::lasso : PenaltyKind::elastic_net, lambda, alpha};
    }
};

struct SolverResult {
    Vector beta_hat;
    std::vector<Index> active_set;
    Index iterations = 0;  // full coordinate cycles
    double kkt_residual = 0.0;
    double objective = 0.0;
    bool converged = false;
};

struct SolverOptions {
    double tol = 1e-8;          // max coordinate change per cycle
    Index max_iters = 100000;   // cycles
    bool check_monotone = false;  // assert the objective never increases
};

// Smallest lambda whose penalized solution is identically zero,
// ||X^T y||_inf / alpha.
double lambda_max(const DesignMatrix& X, const Vector& y, double alpha);

double penalized_objective(const DesignMatrix& X, const Vector& y, const PenaltySpec& penalty,
                           const Vector& beta);

// Cyclic coordinate descent with soft-thresholding; for unit-norm columns
// the update is beta_j <- S(X_j^T r + beta_j, lambda1) / (1 + lambda2).
SolverResult solve_penalized(const DesignMatrix& X, const Vector& y, const PenaltySpec& penalty,
                             const SolverOptions& options = {});

// Same, warm-started from beta0 (used along a descending lambda grid).
SolverResult solve_penalized_warm(const DesignMatrix& X, const Vector& y,
                                  const PenaltySpec& penalty, const Vector& beta0,
                                  const SolverOptions& options = {});

// Coordinatewise stationarity of the penalized objective:
//   active j:  X_j^T r - lambda2 beta_j = lambda1 sign(beta_j)
//   zero j:    |X_j^T r| <= lambda1
// Returns (worst violation <= tol, worst violation).
std::pair<bool, double> kkt_check(const DesignMatrix& X, const Vector& y,
                                  const PenaltySpec& penalty, const Vector& beta_hat, double tol);

enum class ScreenRule { safe, strong_basic };

struct ScreenRuleOutcome {
    std::vector<Index> kept;
    std::vector<Index> discarded;
    ScreenRule rule = ScreenRule::safe;
    double lambda_max = 0.0;
};

// SAFE test: discard j iff |X_j^T y| < lambda - ||X_j|| ||y|| (lambda_max - lambda)/lambda_max.
ScreenRuleOutcome safe_filter(const DesignMatrix& X, const Vector& y, double lambda,
                              double lambda_max);

// Basic strong rule: for the lasso, discard j iff |X_j^T y| < 2*lambda - lambda_max;
// under the elastic-net parametrization the threshold is 2*lambda1 - alpha*lambda_max.
ScreenRuleOutcome strong_filter(const DesignMatrix& X, const Vector& y, double lambda,
                                double lambda_max, double alpha);

// Indices a rule discarded that are nonetheless active in the fitted
// solution. Empty for a correct SAFE screen; the strong rule can produce
// violations, which callers must report rather than drop.
std::vector<Index> rule_violations(const ScreenRuleOutcome& outcome, const Vector& beta_hat);

}  // namespace exsis
