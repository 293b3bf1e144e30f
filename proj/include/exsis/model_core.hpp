#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace exsis {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

class io_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Relative tolerance on column norms accepted as "unit" without rescaling.
inline constexpr double kUnitColumnTol = 1e-10;

// Ceiling that shaves one part in 1e12 first, so a quotient that equals an
// integer up to float round-off does not overshoot by one.
inline Index ceil_index(double x) {
    return static_cast<Index>(std::ceil(x * (1.0 - 1e-12) - 1e-12));
}

// Dense design matrix with unit l2-norm columns. Column-major storage, so
// per-column dot products stay contiguous.
class DesignMatrix {
  public:
    const Matrix& data() const { return data_; }
    Index n() const { return data_.rows(); }
    Index p() const { return data_.cols(); }
    auto column(Index j) const { return data_.col(j); }

    // Accepts a matrix whose columns are already unit norm (within tolerance).
    static DesignMatrix from_unit_columns(Matrix m, double tol = kUnitColumnTol);

  private:
    friend DesignMatrix normalize_columns(const Matrix& raw);
    explicit DesignMatrix(Matrix m) : data_(std::move(m)) {}
    Matrix data_;
};

// Divides every column by its l2 norm. A zero column is rejected with its
// (0-based) index in the message.
DesignMatrix normalize_columns(const Matrix& raw);

// Ground truth for synthetic runs: support, coefficients, noise level.
struct SparseModel {
    std::vector<Index> support;  // sorted, 0-based
    Vector beta;                 // length p, zero off support
    double sigma = 0.0;

    Index p() const { return beta.size(); }
    Index k() const { return static_cast<Index>(support.size()); }
    double beta_min() const;
    double beta_l1() const { return beta.lpNorm<1>(); }
    double beta_l2() const { return beta.norm(); }
    double msr_value() const { return beta_min() / beta_l2(); }

    static SparseModel make(Index p, std::vector<Index> support, const std::vector<double>& values,
                            double sigma);
};

struct ResponseVector {
    Vector y;
    Vector noise;
    std::uint64_t seed = 0;
};

struct ScreeningDiagnostics {
    Vector w;          // X^T y
    Vector xi;         // X^T X beta (signal part)
    Vector eta_tilde;  // X^T eta (noise part)
    bool g_eta_holds = false;
};

// y = X beta + eta, eta iid N(0, sigma^2), deterministic per seed.
ResponseVector simulate_response(const DesignMatrix& X, const SparseModel& model, std::uint64_t seed);

// w = X^T y.
Vector marginal_correlations(const DesignMatrix& X, const Vector& y);

// beta_min / ||beta||_2, always in (0, 1/sqrt(k)].
double msr(const SparseModel& model);

// ||beta||_2 / sigma; +inf when sigma = 0.
double snr(const SparseModel& model);

inline double noise_event_threshold(double sigma, Index p) {
    return 2.0 * std::sqrt(sigma * sigma * std::log(static_cast<double>(p)));
}

// True iff ||X^T eta||_inf <= threshold. The default threshold is the
// Gaussian one, 2*sqrt(sigma^2 log p); other noise families can pass their
// own bound.
bool noise_event_check(const DesignMatrix& X, const Vector& eta, double sigma, Index p);
bool noise_event_check(const DesignMatrix& X, const Vector& eta, double threshold);

// Decomposition w = xi + eta_tilde for a synthetic instance.
ScreeningDiagnostics diagnostics(const DesignMatrix& X, const SparseModel& model,
                                 const ResponseVector& response);

}  // namespace exsis
