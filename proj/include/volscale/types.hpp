#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace volscale {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Rejected input: bad dimensions, non-finite entries, malformed files.
/// Maps to CLI exit code 1.
struct InvalidInput : std::runtime_error {
    explicit InvalidInput(const std::string& msg) : std::runtime_error(msg) {}
};

/// A computation that cannot proceed on otherwise well-formed input:
/// singular systems, infeasible fits, negative radicands. CLI exit code 2.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

// Symmetry tolerance: absolute 1e-10 for unit-scale matrices, relative to
// the Frobenius norm for larger ones.
template <typename Derived>
typename Derived::Scalar symmetry_tol(const Eigen::MatrixBase<Derived>& m) {
    using S = typename Derived::Scalar;
    return S(1e-10) * std::max(S(1), m.norm());
}

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols()) return false;
    return (m - m.transpose()).template lpNorm<Eigen::Infinity>() <= symmetry_tol(m);
}

/// Minimum eigenvalue is allowed to dip to -1e-10 times the largest one.
template <typename Derived>
bool is_psd(const Eigen::MatrixBase<Derived>& m) {
    using S = typename Derived::Scalar;
    if (m.size() == 0) return true;
    Eigen::SelfAdjointEigenSolver<MatrixX<S>> es(
        ((m + m.transpose()) / S(2)).eval(), Eigen::EigenvaluesOnly);
    const S lo = es.eigenvalues().minCoeff();
    const S hi = es.eigenvalues().maxCoeff();
    return lo >= S(-1e-10) * std::max(hi, S(0));
}

template <typename Derived>
typename Derived::Scalar min_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
    using S = typename Derived::Scalar;
    Eigen::SelfAdjointEigenSolver<MatrixX<S>> es(
        ((m + m.transpose()) / S(2)).eval(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace detail

/// Largest eigenvalue modulus of a (not necessarily symmetric) square matrix.
template <typename Derived>
typename Derived::Scalar spectral_radius(const Eigen::MatrixBase<Derived>& m) {
    using S = typename Derived::Scalar;
    if (m.rows() != m.cols()) throw InvalidInput("spectral_radius: matrix must be square");
    if (m.size() == 0) return S(0);
    Eigen::EigenSolver<MatrixX<S>> es(m.derived(), /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Companion matrix of the lag polynomial I - A_1 L - ... - A_p L^p.
/// Its spectral radius is < 1 exactly when the recursion is stable.
template <typename Scalar>
MatrixX<Scalar> companion_matrix(const std::vector<MatrixX<Scalar>>& coeffs) {
    const int p = static_cast<int>(coeffs.size());
    if (p == 0) return MatrixX<Scalar>(0, 0);
    const auto n = coeffs.front().rows();
    MatrixX<Scalar> comp = MatrixX<Scalar>::Zero(n * p, n * p);
    for (int j = 0; j < p; ++j) comp.block(0, j * n, n, n) = coeffs[j];
    if (p > 1)
        comp.block(n, 0, n * (p - 1), n * (p - 1)) =
            MatrixX<Scalar>::Identity(n * (p - 1), n * (p - 1));
    return comp;
}

/// Portfolio weights as fractions of portfolio value. Entries may be
/// negative (short positions) and need not sum to one (leverage).
template <typename Scalar>
class Weights {
public:
    explicit Weights(VectorX<Scalar> lambda) : lambda_(std::move(lambda)) {
        if (lambda_.size() < 1) throw InvalidInput("Weights: empty weight vector");
        if (!lambda_.allFinite()) throw InvalidInput("Weights: non-finite entry");
    }

    const VectorX<Scalar>& lambda() const { return lambda_; }
    Eigen::Index size() const { return lambda_.size(); }

private:
    VectorX<Scalar> lambda_;
};

/// A panel of simple (arithmetic) per-period asset returns: one row per
/// period, one column per asset. Immutable after construction.
template <typename Scalar>
class PanelReturns {
public:
    PanelReturns(MatrixX<Scalar> values, std::vector<std::string> labels,
                 std::string period_length = "1 day")
        : values_(std::move(values)),
          labels_(std::move(labels)),
          period_length_(std::move(period_length)) {
        if (values_.rows() < 2) throw InvalidInput("PanelReturns: need at least 2 periods");
        if (values_.cols() < 1) throw InvalidInput("PanelReturns: need at least 1 asset");
        if (static_cast<Eigen::Index>(labels_.size()) != values_.cols())
            throw InvalidInput("PanelReturns: label count does not match column count");
        for (Eigen::Index t = 0; t < values_.rows(); ++t)
            for (Eigen::Index i = 0; i < values_.cols(); ++i)
                if (!std::isfinite(values_(t, i))) {
                    std::ostringstream os;
                    os << "PanelReturns: non-finite value at row " << t + 1 << ", column "
                       << i + 1 << " (" << labels_[static_cast<std::size_t>(i)] << ")";
                    throw InvalidInput(os.str());
                }
        std::vector<std::string> sorted = labels_;
        std::sort(sorted.begin(), sorted.end());
        auto dup = std::adjacent_find(sorted.begin(), sorted.end());
        if (dup != sorted.end()) throw InvalidInput("PanelReturns: duplicate label '" + *dup + "'");
    }

    const MatrixX<Scalar>& values() const { return values_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& period_length() const { return period_length_; }
    Eigen::Index periods() const { return values_.rows(); }
    Eigen::Index assets() const { return values_.cols(); }

private:
    MatrixX<Scalar> values_;
    std::vector<std::string> labels_;
    std::string period_length_;
};

/// Validate a raw return matrix and wrap it as a panel.
template <typename Derived>
PanelReturns<typename Derived::Scalar> validate_panel(const Eigen::MatrixBase<Derived>& raw,
                                                      std::vector<std::string> labels,
                                                      std::string period_length = "1 day") {
    return PanelReturns<typename Derived::Scalar>(raw.eval(), std::move(labels),
                                                  std::move(period_length));
}

/// Auto-covariances gamma(0..K) of a univariate weakly stationary series.
/// gamma(0) must be positive; every lag obeys |gamma(k)| <= gamma(0).
template <typename Scalar>
class AcfSequence {
public:
    explicit AcfSequence(std::vector<Scalar> gamma) : gamma_(std::move(gamma)) {
        if (gamma_.empty()) throw InvalidInput("AcfSequence: need at least gamma(0)");
        if (!(gamma_.front() > Scalar(0)))
            throw NumericalError("AcfSequence: gamma(0) must be positive");
        const Scalar bound = gamma_.front() * (Scalar(1) + Scalar(1e-12));
        for (std::size_t k = 0; k < gamma_.size(); ++k) {
            if (!std::isfinite(gamma_[k])) throw InvalidInput("AcfSequence: non-finite gamma");
            if (std::abs(gamma_[k]) > bound) {
                std::ostringstream os;
                os << "AcfSequence: |gamma(" << k << ")| exceeds gamma(0) (Cauchy-Schwarz)";
                throw NumericalError(os.str());
            }
        }
    }

    int max_lag() const { return static_cast<int>(gamma_.size()) - 1; }

    /// gamma(k) == gamma(-k); lags beyond max_lag() are an error.
    Scalar gamma(int k) const {
        const int a = std::abs(k);
        if (a > max_lag()) throw InvalidInput("AcfSequence: lag out of range");
        return gamma_[static_cast<std::size_t>(a)];
    }

    /// gamma(k) for stored lags, zero beyond; callers that truncate are
    /// expected to surface that to the user.
    Scalar gamma_or_zero(int k) const {
        const int a = std::abs(k);
        return a > max_lag() ? Scalar(0) : gamma_[static_cast<std::size_t>(a)];
    }

    Scalar rho(int k) const { return gamma(k) / gamma_.front(); }

    const std::vector<Scalar>& gammas() const { return gamma_; }

private:
    std::vector<Scalar> gamma_;
};

/// Lagged covariance matrices Gamma(0..K) of an n-dimensional weakly
/// stationary series, with Gamma(k)_{ij} = cov(X^i_{t+k}, X^j_t).
/// Negative lags resolve through Gamma(-k) = Gamma(k)^T.
template <typename Scalar>
class CovSequence {
public:
    explicit CovSequence(std::vector<MatrixX<Scalar>> gammas) : gammas_(std::move(gammas)) {
        if (gammas_.empty()) throw InvalidInput("CovSequence: need at least Gamma(0)");
        const auto n = gammas_.front().rows();
        for (const auto& g : gammas_) {
            if (g.rows() != n || g.cols() != n)
                throw InvalidInput("CovSequence: all matrices must be n x n with equal n");
            if (!g.allFinite()) throw InvalidInput("CovSequence: non-finite entry");
        }
        if (!detail::is_symmetric(gammas_.front()))
            throw InvalidInput("CovSequence: Gamma(0) must be symmetric");
        if (!detail::is_psd(gammas_.front()))
            throw NumericalError("CovSequence: Gamma(0) must be positive semi-definite");
    }

    Eigen::Index dimension() const { return gammas_.front().rows(); }
    int max_lag() const { return static_cast<int>(gammas_.size()) - 1; }

    /// Gamma(k); negative k returns the transpose of the stored matrix.
    MatrixX<Scalar> at(int k) const {
        const int a = std::abs(k);
        if (a > max_lag()) throw InvalidInput("CovSequence: lag out of range");
        if (k >= 0) return gammas_[static_cast<std::size_t>(a)];
        return gammas_[static_cast<std::size_t>(a)].transpose();
    }

    MatrixX<Scalar> at_or_zero(int k) const {
        if (std::abs(k) > max_lag()) return MatrixX<Scalar>::Zero(dimension(), dimension());
        return at(k);
    }

    const std::vector<MatrixX<Scalar>>& gammas() const { return gammas_; }

private:
    std::vector<MatrixX<Scalar>> gammas_;
};

/// Vector ARMA model X_t = sum_k Phi_k X_{t-k} + sum_j Theta_j Z_{t-j} + Z_t
/// with innovation covariance Sigma. Construction checks that Sigma is
/// symmetric with no materially negative eigenvalue and, when an AR part is
/// present, that the companion matrix has spectral radius below one.
template <typename Scalar>
class VarmaModel {
public:
    VarmaModel(std::vector<MatrixX<Scalar>> phi, std::vector<MatrixX<Scalar>> theta,
               MatrixX<Scalar> sigma)
        : phi_(std::move(phi)), theta_(std::move(theta)), sigma_(std::move(sigma)) {
        if (sigma_.rows() != sigma_.cols()) throw InvalidInput("VarmaModel: Sigma must be square");
        const auto n = sigma_.rows();
        if (n < 1) throw InvalidInput("VarmaModel: dimension must be at least 1");
        for (const auto& m : phi_)
            if (m.rows() != n || m.cols() != n)
                throw InvalidInput("VarmaModel: Phi coefficient dimension mismatch");
        for (const auto& m : theta_)
            if (m.rows() != n || m.cols() != n)
                throw InvalidInput("VarmaModel: Theta coefficient dimension mismatch");
        if (!sigma_.allFinite()) throw InvalidInput("VarmaModel: non-finite Sigma");
        if (!detail::is_symmetric(sigma_)) throw InvalidInput("VarmaModel: Sigma must be symmetric");
        if (detail::min_eigenvalue(sigma_) < Scalar(-1e-10) * sigma_.norm())
            throw NumericalError("VarmaModel: Sigma has a negative eigenvalue");
        if (!phi_.empty()) {
            spectral_radius_ = spectral_radius(companion_matrix(phi_));
            if (!(spectral_radius_ < Scalar(1) - Scalar(1e-12)))
                throw InvalidInput("VarmaModel: AR part is not stationary (spectral radius " +
                                   std::to_string(static_cast<double>(spectral_radius_)) + ")");
        }
    }

    static VarmaModel white_noise(MatrixX<Scalar> sigma) {
        return VarmaModel({}, {}, std::move(sigma));
    }

    int p() const { return static_cast<int>(phi_.size()); }
    int q() const { return static_cast<int>(theta_.size()); }
    Eigen::Index dimension() const { return sigma_.rows(); }
    const std::vector<MatrixX<Scalar>>& phi() const { return phi_; }
    const std::vector<MatrixX<Scalar>>& theta() const { return theta_; }
    const MatrixX<Scalar>& sigma() const { return sigma_; }
    /// Companion spectral radius of the AR part; zero when p() == 0.
    Scalar ar_spectral_radius() const { return spectral_radius_; }

private:
    std::vector<MatrixX<Scalar>> phi_;
    std::vector<MatrixX<Scalar>> theta_;
    MatrixX<Scalar> sigma_;
    Scalar spectral_radius_ = Scalar(0);
};

/// One holding period in a volatility scaling table.
template <typename Scalar>
struct ScalingRow {
    int horizon = 1;       // d, in periods
    Scalar sigma_d{};      // d-period portfolio volatility, return units
    Scalar delta_d{};      // scaling factor: sigma_d = sigma_1 * delta_d
    Scalar sqrt_d{};       // square-root-of-time baseline factor
    Scalar ratio{};        // delta_d / sqrt(d)
};

template <typename Scalar>
struct ScalingReport {
    Scalar sigma_1{};  // one-period portfolio volatility
    std::vector<ScalingRow<Scalar>> rows;

    /// sigma_d must be nonnegative and consistent with sigma_1 * delta_d.
    bool consistent(Scalar rel_tol = Scalar(1e-9)) const {
        for (const auto& r : rows) {
            if (!(r.sigma_d >= Scalar(0))) return false;
            if (std::abs(r.sigma_d - sigma_1 * r.delta_d) >
                rel_tol * std::max(Scalar(1), std::abs(r.sigma_d)))
                return false;
        }
        return true;
    }
};

/// Per-asset Euler decomposition of the d-period portfolio volatility.
/// delta entries are NaN where the per-asset factor is undefined
/// (asset uncorrelated with the portfolio at lag zero).
template <typename Scalar>
struct ContributionHorizon {
    int horizon = 1;
    Scalar sigma_portfolio{};        // sigma(lambda, d)
    VectorX<Scalar> sigma;           // per-asset contributions, sum to sigma_portfolio
    VectorX<Scalar> share;           // sigma_i / sigma_portfolio
    VectorX<Scalar> delta;           // per-asset scaling factors delta(i, d)
    std::vector<bool> delta_defined;

    /// Full-allocation check: contributions sum to the portfolio volatility.
    bool fully_allocated(Scalar rel_tol = Scalar(1e-10)) const {
        return std::abs(sigma.sum() - sigma_portfolio) <=
               rel_tol * std::max(std::abs(sigma_portfolio), Scalar(1e-300));
    }
};

template <typename Scalar>
struct ContributionReport {
    std::vector<ContributionHorizon<Scalar>> horizons;
};

}  // namespace volscale
