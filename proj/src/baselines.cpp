#include "exsis/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace exsis {

namespace {

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

}  // namespace

double lambda_max(const DesignMatrix& X, const Vector& y, double alpha) {
    if (alpha <= 0.0 || alpha > 1.0) throw std::invalid_argument("lambda_max: alpha in (0, 1]");
    return (X.data().transpose() * y).lpNorm<Eigen::Infinity>() / alpha;
}

double penalized_objective(const DesignMatrix& X, const Vector& y, const PenaltySpec& penalty,
                           const Vector& beta) {
    const Vector r = y - X.data() * beta;
    return 0.5 * r.squaredNorm() + penalty.lambda1() * beta.lpNorm<1>() +
           0.5 * penalty.lambda2() * beta.squaredNorm();
}

SolverResult solve_penalized_warm(const DesignMatrix& X, const Vector& y,
                                  const PenaltySpec& penalty, const Vector& beta0,
                                  const SolverOptions& options) {
    if (penalty.lambda <= 0.0) throw std::invalid_argument("solve_penalized: lambda must be > 0");
    if (y.size() != X.n()) throw std::invalid_argument("solve_penalized: dimension mismatch");
    if (beta0.size() != X.p()) throw std::invalid_argument("solve_penalized: bad warm start");

    const double lambda1 = penalty.lambda1();
    const double lambda2 = penalty.lambda2();
    const Index p = X.p();

    SolverResult result;
    result.beta_hat = beta0;
    Vector residual = y - X.data() * beta0;

    double last_objective = options.check_monotone
                                ? penalized_objective(X, y, penalty, result.beta_hat)
                                : 0.0;

    for (Index cycle = 0; cycle < options.max_iters; ++cycle) {
        double max_change = 0.0;
        for (Index j = 0; j < p; ++j) {
            const double old = result.beta_hat[j];
            const double rho = X.column(j).dot(residual) + old;
            const double updated = soft_threshold(rho, lambda1) / (1.0 + lambda2);
            if (updated != old) {
                residual += (old - updated) * X.column(j);
                result.beta_hat[j] = updated;
                max_change = std::max(max_change, std::abs(updated - old));
            }
        }
        ++result.iterations;
        if (options.check_monotone) {
            const double objective = penalized_objective(X, y, penalty, result.beta_hat);
            if (objective > last_objective + 1e-10 * (1.0 + std::abs(last_objective)))
                throw std::runtime_error("solve_penalized: objective increased within a cycle");
            last_objective = objective;
        }
        if (max_change < options.tol) {
            result.converged = true;
            break;
        }
    }

    for (Index j = 0; j < p; ++j)
        if (result.beta_hat[j] != 0.0) result.active_set.push_back(j);
    result.objective = penalized_objective(X, y, penalty, result.beta_hat);
    result.kkt_residual = kkt_check(X, y, penalty, result.beta_hat, 0.0).second;
    return result;
}

SolverResult solve_penalized(const DesignMatrix& X, const Vector& y, const PenaltySpec& penalty,
                             const SolverOptions& options) {
    return solve_penalized_warm(X, y, penalty, Vector::Zero(X.p()), options);
}

std::pair<bool, double> kkt_check(const DesignMatrix& X, const Vector& y,
                                  const PenaltySpec& penalty, const Vector& beta_hat, double tol) {
    const double lambda1 = penalty.lambda1();
    const double lambda2 = penalty.lambda2();
    const Vector correlations = X.data().transpose() * (y - X.data() * beta_hat);
    double worst = 0.0;
    for (Index j = 0; j < X.p(); ++j) {
        const double beta_j = beta_hat[j];
        double violation;
        if (beta_j != 0.0) {
            violation = std::abs(correlations[j] - lambda2 * beta_j -
                                 lambda1 * (beta_j > 0 ? 1.0 : -1.0));
        } else {
            violation = std::max(0.0, std::abs(correlations[j]) - lambda1);
        }
        worst = std::max(worst, violation);
    }
    return {worst <= tol, worst};
}

namespace {

ScreenRuleOutcome apply_threshold(const DesignMatrix& X, const Vector& correlations,
                                  double threshold, ScreenRule rule, double lmax) {
    ScreenRuleOutcome out;
    out.rule = rule;
    out.lambda_max = lmax;
    for (Index j = 0; j < X.p(); ++j) {
        if (std::abs(correlations[j]) < threshold)
            out.discarded.push_back(j);
        else
            out.kept.push_back(j);
    }
    return out;
}

}  // namespace

ScreenRuleOutcome safe_filter(const DesignMatrix& X, const Vector& y, double lambda,
                              double lambda_max) {
    if (lambda <= 0.0 || lambda_max <= 0.0)
        throw std::invalid_argument("safe_filter: lambda, lambda_max > 0 required");
    const Vector correlations = X.data().transpose() * y;
    const double y_norm = y.norm();
    // Unit-norm columns by construction of DesignMatrix.
    const double threshold = lambda - y_norm * (lambda_max - lambda) / lambda_max;
    return apply_threshold(X, correlations, threshold, ScreenRule::safe, lambda_max);
}

ScreenRuleOutcome strong_filter(const DesignMatrix& X, const Vector& y, double lambda,
                                double lambda_max, double alpha) {
    if (lambda <= 0.0 || lambda_max <= 0.0)
        throw std::invalid_argument("strong_filter: lambda, lambda_max > 0 required");
    if (alpha <= 0.0 || alpha > 1.0) throw std::invalid_argument("strong_filter: alpha in (0, 1]");
    const Vector correlations = X.data().transpose() * y;
    const double threshold = 2.0 * alpha * lambda - alpha * lambda_max;
    return apply_threshold(X, correlations, threshold, ScreenRule::strong_basic, lambda_max);
}

std::vector<Index> rule_violations(const ScreenRuleOutcome& outcome, const Vector& beta_hat) {
    std::vector<Index> violations;
    for (Index j : outcome.discarded)
        if (beta_hat[j] != 0.0) violations.push_back(j);
    return violations;
}

}  // namespace exsis
