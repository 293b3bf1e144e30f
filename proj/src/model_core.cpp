#include "exsis/model_core.hpp"

#include <algorithm>
#include <cmath>

#include "exsis/rng.hpp"

namespace exsis {

DesignMatrix DesignMatrix::from_unit_columns(Matrix m, double tol) {
    for (Index j = 0; j < m.cols(); ++j) {
        const double nrm = m.col(j).norm();
        if (nrm == 0.0)
            throw io_error("column " + std::to_string(j) + " has zero norm");
        if (std::abs(nrm - 1.0) > tol) m.col(j) /= nrm;
    }
    return DesignMatrix(std::move(m));
}

DesignMatrix normalize_columns(const Matrix& raw) {
    if (raw.rows() < 1 || raw.cols() < 1)
        throw std::invalid_argument("normalize_columns: empty matrix");
    if (!raw.allFinite())
        throw std::invalid_argument("normalize_columns: non-finite entries");
    Matrix out = raw;
    for (Index j = 0; j < out.cols(); ++j) {
        const double nrm = out.col(j).norm();
        if (nrm == 0.0)
            throw std::invalid_argument("normalize_columns: column " + std::to_string(j) +
                                        " has zero norm");
        out.col(j) /= nrm;
    }
    return DesignMatrix(std::move(out));
}

double SparseModel::beta_min() const {
    if (support.empty()) throw std::invalid_argument("SparseModel: empty support");
    double m = std::numeric_limits<double>::infinity();
    for (Index i : support) m = std::min(m, std::abs(beta[i]));
    return m;
}

SparseModel SparseModel::make(Index p, std::vector<Index> support, const std::vector<double>& values,
                              double sigma) {
    if (support.size() != values.size())
        throw std::invalid_argument("SparseModel::make: support/value size mismatch");
    if (sigma < 0) throw std::invalid_argument("SparseModel::make: sigma < 0");
    std::sort(support.begin(), support.end());
    if (std::adjacent_find(support.begin(), support.end()) != support.end())
        throw std::invalid_argument("SparseModel::make: duplicate support index");
    SparseModel model;
    model.beta = Vector::Zero(p);
    for (std::size_t i = 0; i < support.size(); ++i) {
        const Index j = support[i];
        if (j < 0 || j >= p) throw std::invalid_argument("SparseModel::make: index out of range");
        if (values[i] == 0.0)
            throw std::invalid_argument("SparseModel::make: zero coefficient on support");
        model.beta[j] = values[i];
    }
    model.support = std::move(support);
    model.sigma = sigma;
    return model;
}

ResponseVector simulate_response(const DesignMatrix& X, const SparseModel& model,
                                 std::uint64_t seed) {
    if (model.p() != X.p())
        throw std::invalid_argument("simulate_response: dimension mismatch");
    if (model.k() >= X.n())
        throw std::invalid_argument("simulate_response: requires k < n");
    ResponseVector r;
    r.seed = seed;
    r.noise = Vector::Zero(X.n());
    if (model.sigma > 0.0) {
        Rng rng(seed);
        for (Index i = 0; i < X.n(); ++i) r.noise[i] = model.sigma * rng.normal();
    }
    r.y = r.noise;
    for (Index j : model.support) r.y += model.beta[j] * X.column(j);
    return r;
}

Vector marginal_correlations(const DesignMatrix& X, const Vector& y) {
    if (y.size() != X.n())
        throw std::invalid_argument("marginal_correlations: dimension mismatch");
    if (!y.allFinite())
        throw std::invalid_argument("marginal_correlations: non-finite response");
    return X.data().transpose() * y;
}

double msr(const SparseModel& model) {
    return model.msr_value();
}

double snr(const SparseModel& model) {
    if (model.sigma == 0.0) return std::numeric_limits<double>::infinity();
    return model.beta_l2() / model.sigma;
}

bool noise_event_check(const DesignMatrix& X, const Vector& eta, double sigma, Index p) {
    return noise_event_check(X, eta, noise_event_threshold(sigma, p));
}

bool noise_event_check(const DesignMatrix& X, const Vector& eta, double threshold) {
    if (eta.size() != X.n())
        throw std::invalid_argument("noise_event_check: dimension mismatch");
    const double worst = (X.data().transpose() * eta).lpNorm<Eigen::Infinity>();
    return worst <= threshold;
}

ScreeningDiagnostics diagnostics(const DesignMatrix& X, const SparseModel& model,
                                 const ResponseVector& response) {
    ScreeningDiagnostics d;
    d.w = marginal_correlations(X, response.y);
    Vector signal = Vector::Zero(X.n());
    for (Index j : model.support) signal += model.beta[j] * X.column(j);
    d.xi = X.data().transpose() * signal;
    d.eta_tilde = X.data().transpose() * response.noise;
    d.g_eta_holds = noise_event_check(X, response.noise, model.sigma, X.p());
    return d;
}

}  // namespace exsis
