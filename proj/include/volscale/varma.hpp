#pragma once

#include <optional>
#include <vector>

#include "volscale/contributions.hpp"
#include "volscale/scaling.hpp"
#include "volscale/types.hpp"

namespace volscale {

namespace detail {

// vec(A^T) = commutation(n) * vec(A), column-major vec.
template <typename Scalar>
MatrixX<Scalar> commutation(Eigen::Index n) {
    MatrixX<Scalar> K = MatrixX<Scalar>::Zero(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) K(i + j * n, j + i * n) = Scalar(1);
    return K;
}

// vec(A X) = kron_left(A) * vec(X): block diagonal with A repeated.
template <typename Scalar>
MatrixX<Scalar> kron_left(const MatrixX<Scalar>& a) {
    const Eigen::Index n = a.rows();
    MatrixX<Scalar> K = MatrixX<Scalar>::Zero(n * n, n * n);
    for (Eigen::Index c = 0; c < n; ++c) K.block(c * n, c * n, n, n) = a;
    return K;
}

// Kronecker product, (A (x) B).block(i*nb, j*nb) = A(i,j) * B.
template <typename Scalar>
MatrixX<Scalar> kron(const MatrixX<Scalar>& a, const MatrixX<Scalar>& b) {
    MatrixX<Scalar> K(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            K.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return K;
}

}  // namespace detail

/// Cross-covariances Gamma_XZ(k) = Cov(X_t, Z_{t-k}) between the process and
/// its driving noise, by forward recursion. Gamma_XZ(k) = 0 for k < 0.
template <typename Scalar>
std::vector<MatrixX<Scalar>> varma_cross_cov(const VarmaModel<Scalar>& model, int max_lag) {
    if (max_lag < 0) throw InvalidInput("varma_cross_cov: max_lag must be nonnegative");
    const int p = model.p();
    const int q = model.q();

    std::vector<MatrixX<Scalar>> xz;
    xz.reserve(static_cast<std::size_t>(max_lag) + 1);
    xz.push_back(model.sigma());
    for (int k = 1; k <= max_lag; ++k) {
        MatrixX<Scalar> g = MatrixX<Scalar>::Zero(model.dimension(), model.dimension());
        for (int j = 1; j <= std::min(k, p); ++j)
            g += model.phi()[static_cast<std::size_t>(j - 1)] * xz[static_cast<std::size_t>(k - j)];
        if (k <= q) g += model.theta()[static_cast<std::size_t>(k - 1)] * model.sigma();
        xz.push_back(std::move(g));
    }
    return xz;
}

/// Model-implied autocovariance matrices Gamma(0..max_lag).
///
/// Pure moving average: Gamma(k) = sum_{j=k}^{q} Theta_j Sigma Theta_{j-k}^T
/// with Theta_0 = I. With an autoregressive part, Gamma(0..p) solve the
/// Yule-Walker equations
///   Gamma(k) - sum_{j=1}^{p} Phi_j Gamma(k-j) = sum_{j=k}^{q} Theta_j Gamma_XZ(j-k)^T,
/// vectorized into one linear system (negative lags are transposes of the
/// unknowns via the commutation matrix); higher lags follow by recursion.
template <typename Scalar>
CovSequence<Scalar> varma_acov(const VarmaModel<Scalar>& model, int max_lag) {
    if (max_lag < 0) throw InvalidInput("varma_acov: max_lag must be nonnegative");
    const int p = model.p();
    const int q = model.q();
    const Eigen::Index n = model.dimension();
    const MatrixX<Scalar> eye = MatrixX<Scalar>::Identity(n, n);

    if (p == 0) {
        std::vector<MatrixX<Scalar>> gam;
        gam.reserve(static_cast<std::size_t>(max_lag) + 1);
        for (int k = 0; k <= max_lag; ++k) {
            MatrixX<Scalar> g = MatrixX<Scalar>::Zero(n, n);
            for (int j = k; j <= q; ++j) {
                const MatrixX<Scalar>& left =
                    (j == 0) ? eye : model.theta()[static_cast<std::size_t>(j - 1)];
                const MatrixX<Scalar>& right =
                    (j == k) ? eye : model.theta()[static_cast<std::size_t>(j - k - 1)];
                g += left * model.sigma() * right.transpose();
            }
            gam.push_back(std::move(g));
        }
        gam[0] = ((gam[0] + gam[0].transpose()) / Scalar(2)).eval();
        return CovSequence<Scalar>(std::move(gam));
    }

    const std::vector<MatrixX<Scalar>> xz = varma_cross_cov(model, q);
    const int rhs_top = std::max(p, q);
    std::vector<MatrixX<Scalar>> c(static_cast<std::size_t>(rhs_top) + 1,
                                   MatrixX<Scalar>::Zero(n, n));
    for (int k = 0; k <= std::min(rhs_top, q); ++k)
        for (int j = k; j <= q; ++j) {
            const MatrixX<Scalar>& th =
                (j == 0) ? eye : model.theta()[static_cast<std::size_t>(j - 1)];
            c[static_cast<std::size_t>(k)] +=
                th * xz[static_cast<std::size_t>(j - k)].transpose();
        }

    // Joint solve for Gamma(0..p): equations k = 0..p, with Gamma(k-j) for
    // k-j < 0 rewritten as commutation * vec(Gamma(j-k)).
    const Eigen::Index nn = n * n;
    const Eigen::Index N = (p + 1) * nn;
    const MatrixX<Scalar> K = detail::commutation<Scalar>(n);
    MatrixX<Scalar> A = MatrixX<Scalar>::Zero(N, N);
    VectorX<Scalar> rhs(N);
    for (int k = 0; k <= p; ++k) {
        A.block(k * nn, k * nn, nn, nn) += MatrixX<Scalar>::Identity(nn, nn);
        for (int j = 1; j <= p; ++j) {
            const MatrixX<Scalar> phi_kron =
                detail::kron_left(model.phi()[static_cast<std::size_t>(j - 1)]);
            const int m = k - j;
            if (m >= 0)
                A.block(k * nn, m * nn, nn, nn) -= phi_kron;
            else
                A.block(k * nn, -m * nn, nn, nn) -= phi_kron * K;
        }
        const MatrixX<Scalar>& ck = c[static_cast<std::size_t>(k)];
        rhs.segment(k * nn, nn) = Eigen::Map<const VectorX<Scalar>>(ck.data(), nn);
    }

    Eigen::FullPivLU<MatrixX<Scalar>> lu(A);
    if (!lu.isInvertible())
        throw NumericalError("varma_acov: Yule-Walker system is singular (model at the stationarity boundary)");
    const VectorX<Scalar> sol = lu.solve(rhs);

    std::vector<MatrixX<Scalar>> gam;
    gam.reserve(static_cast<std::size_t>(std::max(max_lag, p)) + 1);
    for (int k = 0; k <= p; ++k)
        gam.push_back(Eigen::Map<const MatrixX<Scalar>>(sol.data() + k * nn, n, n));
    gam[0] = ((gam[0] + gam[0].transpose()) / Scalar(2)).eval();

    for (int k = p + 1; k <= max_lag; ++k) {
        MatrixX<Scalar> g = MatrixX<Scalar>::Zero(n, n);
        for (int j = 1; j <= p; ++j)
            g += model.phi()[static_cast<std::size_t>(j - 1)] * gam[static_cast<std::size_t>(k - j)];
        if (k <= q) g += c[static_cast<std::size_t>(k)];
        gam.push_back(std::move(g));
    }
    gam.resize(static_cast<std::size_t>(max_lag) + 1);
    return CovSequence<Scalar>(std::move(gam));
}

/// Stationary covariance of a VAR(1): the unique solution of
/// Gamma(0) = Phi1 Gamma(0) Phi1^T + Sigma, by the vectorized linear solve
/// (I - Phi1 (x) Phi1) vec(Gamma(0)) = vec(Sigma).
template <typename DerivedP, typename DerivedS,
          typename Scalar = typename DerivedP::Scalar>
MatrixX<Scalar> var1_stationary_cov(const Eigen::MatrixBase<DerivedP>& phi1,
                                    const Eigen::MatrixBase<DerivedS>& sigma) {
    if (phi1.rows() != phi1.cols() || sigma.rows() != sigma.cols() ||
        phi1.rows() != sigma.rows())
        throw InvalidInput("var1_stationary_cov: Phi1 and Sigma must be square of equal size");
    if (!(spectral_radius(phi1) < Scalar(1) - Scalar(1e-12)))
        throw InvalidInput("var1_stationary_cov: spectral radius of Phi1 must be below 1");

    const Eigen::Index n = phi1.rows();
    const MatrixX<Scalar> phi = phi1;
    const MatrixX<Scalar> M =
        MatrixX<Scalar>::Identity(n * n, n * n) - detail::kron(phi, phi);
    const MatrixX<Scalar> sig = sigma;
    Eigen::FullPivLU<MatrixX<Scalar>> lu(M);
    if (!lu.isInvertible())
        throw NumericalError("var1_stationary_cov: vectorized system is singular");
    const VectorX<Scalar> v =
        lu.solve(Eigen::Map<const VectorX<Scalar>>(sig.data(), n * n));
    MatrixX<Scalar> g0 = Eigen::Map<const MatrixX<Scalar>>(v.data(), n, n);
    return ((g0 + g0.transpose()) / Scalar(2)).eval();
}

/// Autocovariances Gamma(k) = Phi1^k Gamma(0) of a VAR(1) driven by Sigma.
template <typename DerivedP, typename DerivedS,
          typename Scalar = typename DerivedP::Scalar>
CovSequence<Scalar> var1_cov_sequence(const Eigen::MatrixBase<DerivedP>& phi1,
                                      const Eigen::MatrixBase<DerivedS>& sigma, int max_lag) {
    if (max_lag < 0) throw InvalidInput("var1_cov_sequence: max_lag must be nonnegative");
    std::vector<MatrixX<Scalar>> gam;
    gam.reserve(static_cast<std::size_t>(max_lag) + 1);
    gam.push_back(var1_stationary_cov(phi1, sigma));
    for (int k = 1; k <= max_lag; ++k) gam.push_back(phi1 * gam.back());
    return CovSequence<Scalar>(std::move(gam));
}

/// d-period scaling factor of a VMA(1) portfolio, in closed form:
///   delta(d) = sqrt( d + 2(d-1) * lambda^T Theta1 Sigma lambda
///                              / lambda^T (Theta1 Sigma Theta1^T + Sigma) lambda ).
template <typename DerivedT, typename DerivedS,
          typename Scalar = typename DerivedT::Scalar>
Scalar vma1_delta_d(const Eigen::MatrixBase<DerivedT>& theta1,
                    const Eigen::MatrixBase<DerivedS>& sigma, const Weights<Scalar>& w, int d) {
    if (d < 1) throw InvalidInput("vma1_delta_d: requires d >= 1");
    if (theta1.rows() != theta1.cols() || sigma.rows() != sigma.cols() ||
        theta1.rows() != sigma.rows() || theta1.rows() != w.size())
        throw InvalidInput("vma1_delta_d: dimension mismatch");

    const auto& lambda = w.lambda();
    const VectorX<Scalar> tl = theta1.transpose() * lambda;
    const VectorX<Scalar> sl = sigma * lambda;
    const Scalar a = Scalar(tl.dot(sigma * tl)) + lambda.dot(sl);  // lag-0 variance
    const Scalar b = tl.dot(sl);                                   // lag-1 covariance
    if (!(a > Scalar(0))) throw NumericalError("vma1_delta_d: zero portfolio variance");
    const Scalar radicand = Scalar(d) + Scalar(2) * Scalar(d - 1) * b / a;
    if (radicand < Scalar(0))
        throw NumericalError("vma1_delta_d: negative scaled variance");
    return std::sqrt(radicand);
}

/// Per-asset VMA(1) contribution scaling
///   delta(i, d) = ( d + 2(d-1) (Theta1 Sigma lambda)_i
///                            / ((Theta1 Sigma Theta1^T + Sigma) lambda)_i ) / delta(d);
/// undefined for assets with zero lag-0 covariance with the portfolio.
template <typename DerivedT, typename DerivedS,
          typename Scalar = typename DerivedT::Scalar>
PerAssetScaling<Scalar> vma1_delta_i_d(const Eigen::MatrixBase<DerivedT>& theta1,
                                       const Eigen::MatrixBase<DerivedS>& sigma,
                                       const Weights<Scalar>& w, int d) {
    const Scalar dlt = vma1_delta_d(theta1, sigma, w, d);
    const auto& lambda = w.lambda();
    const VectorX<Scalar> g1 = theta1 * (sigma * lambda);
    const VectorX<Scalar> g0 = theta1 * (sigma * (theta1.transpose() * lambda)) + sigma * lambda;

    const auto n = lambda.size();
    PerAssetScaling<Scalar> out;
    out.value = VectorX<Scalar>::Constant(n, std::numeric_limits<Scalar>::quiet_NaN());
    out.defined.assign(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (g0(i) == Scalar(0)) continue;
        out.value(i) = (Scalar(d) + Scalar(2) * Scalar(d - 1) * g1(i) / g0(i)) / dlt;
        out.defined[static_cast<std::size_t>(i)] = true;
    }
    return out;
}

/// d-period scaling factor of a VAR(1) portfolio:
///   delta(d) = sqrt( d + 2 sum_{k=1}^{d-1} (d-k) lambda^T Phi1^k Gamma(0) lambda
///                                      / lambda^T Gamma(0) lambda ).
template <typename DerivedP, typename DerivedG,
          typename Scalar = typename DerivedP::Scalar>
Scalar var1_delta_d(const Eigen::MatrixBase<DerivedP>& phi1,
                    const Eigen::MatrixBase<DerivedG>& gamma0, const Weights<Scalar>& w, int d) {
    if (d < 1) throw InvalidInput("var1_delta_d: requires d >= 1");
    if (phi1.rows() != phi1.cols() || gamma0.rows() != gamma0.cols() ||
        phi1.rows() != gamma0.rows() || phi1.rows() != w.size())
        throw InvalidInput("var1_delta_d: dimension mismatch");
    if (!(spectral_radius(phi1) < Scalar(1) - Scalar(1e-12)))
        throw InvalidInput("var1_delta_d: spectral radius of Phi1 must be below 1");

    const auto& lambda = w.lambda();
    VectorX<Scalar> u = gamma0 * lambda;
    const Scalar a = lambda.dot(u);
    if (!(a > Scalar(0))) throw NumericalError("var1_delta_d: zero portfolio variance");
    Scalar s = Scalar(0);
    for (int k = 1; k < d; ++k) {
        u = phi1 * u;
        s += Scalar(d - k) * lambda.dot(u);
    }
    const Scalar radicand = Scalar(d) + Scalar(2) * s / a;
    if (radicand < Scalar(0)) throw NumericalError("var1_delta_d: negative scaled variance");
    return std::sqrt(radicand);
}

/// Convenience overload deriving Gamma(0) from the innovation covariance.
template <typename DerivedP, typename DerivedS,
          typename Scalar = typename DerivedP::Scalar>
Scalar var1_delta_d_from_sigma(const Eigen::MatrixBase<DerivedP>& phi1,
                               const Eigen::MatrixBase<DerivedS>& sigma,
                               const Weights<Scalar>& w, int d) {
    return var1_delta_d(phi1, var1_stationary_cov(phi1, sigma), w, d);
}

/// Per-asset VAR(1) contribution scaling
///   delta(i, d) = ( d + 2 sum_{k=1}^{d-1} (d-k) (Phi1^k Gamma(0) lambda)_i
///                                       / (Gamma(0) lambda)_i ) / delta(d).
template <typename DerivedP, typename DerivedG,
          typename Scalar = typename DerivedP::Scalar>
PerAssetScaling<Scalar> var1_delta_i_d(const Eigen::MatrixBase<DerivedP>& phi1,
                                       const Eigen::MatrixBase<DerivedG>& gamma0,
                                       const Weights<Scalar>& w, int d) {
    if (d < 1) throw InvalidInput("var1_delta_i_d: requires d >= 1");
    if (phi1.rows() != phi1.cols() || gamma0.rows() != gamma0.cols() ||
        phi1.rows() != gamma0.rows() || phi1.rows() != w.size())
        throw InvalidInput("var1_delta_i_d: dimension mismatch");
    if (!(spectral_radius(phi1) < Scalar(1) - Scalar(1e-12)))
        throw InvalidInput("var1_delta_i_d: spectral radius of Phi1 must be below 1");

    const auto& lambda = w.lambda();
    const VectorX<Scalar> v = gamma0 * lambda;
    const Scalar a = lambda.dot(v);
    if (!(a > Scalar(0))) throw NumericalError("var1_delta_i_d: zero portfolio variance");
    VectorX<Scalar> u = v;
    VectorX<Scalar> s = VectorX<Scalar>::Zero(lambda.size());
    for (int k = 1; k < d; ++k) {
        u = phi1 * u;
        s += Scalar(d - k) * u;
    }
    const Scalar radicand = Scalar(d) + Scalar(2) * lambda.dot(s) / a;
    if (radicand < Scalar(0)) throw NumericalError("var1_delta_i_d: negative scaled variance");
    const Scalar dlt = std::sqrt(radicand);

    PerAssetScaling<Scalar> out;
    out.value = VectorX<Scalar>::Constant(lambda.size(), std::numeric_limits<Scalar>::quiet_NaN());
    out.defined.assign(static_cast<std::size_t>(lambda.size()), false);
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (v(i) == Scalar(0)) continue;
        out.value(i) = (Scalar(d) + Scalar(2) * s(i) / v(i)) / dlt;
        out.defined[static_cast<std::size_t>(i)] = true;
    }
    return out;
}

/// Moment fit of a VAR(1) coefficient: Phi1 = Gamma(1) Gamma(0)^{-1}.
template <typename Scalar>
struct Var1Fit {
    MatrixX<Scalar> phi1;
    Scalar spectral_radius{};
    bool stable = false;  // spectral radius < 1
};

template <typename DerivedG0, typename DerivedG1,
          typename Scalar = typename DerivedG0::Scalar>
Var1Fit<Scalar> fit_phi1_from_moments(const Eigen::MatrixBase<DerivedG0>& gamma0,
                                      const Eigen::MatrixBase<DerivedG1>& gamma1) {
    if (gamma0.rows() != gamma0.cols() || gamma1.rows() != gamma1.cols() ||
        gamma0.rows() != gamma1.rows())
        throw InvalidInput("fit_phi1_from_moments: matrices must be square of equal size");
    const MatrixX<Scalar> g0t = gamma0.transpose();
    Eigen::FullPivLU<MatrixX<Scalar>> lu(g0t);
    if (!lu.isInvertible())
        throw NumericalError("fit_phi1_from_moments: Gamma(0) is singular");
    Var1Fit<Scalar> fit;
    fit.phi1 = lu.solve(gamma1.transpose()).transpose();
    fit.spectral_radius = spectral_radius(fit.phi1);
    fit.stable = fit.spectral_radius < Scalar(1);
    return fit;
}

/// Moment fit of an MA(1) from the lag-1 autocorrelation: the invertible root
/// of theta/(1+theta^2) = rho(1), which requires |rho(1)| <= 1/2.
template <typename Scalar>
struct Ma1Fit {
    Scalar theta1{};
    bool at_boundary = false;  // |rho(1)| = 1/2, theta1 = +-1, not strictly invertible
};

template <typename Scalar>
Ma1Fit<Scalar> fit_ma1_from_rho(Scalar rho1) {
    if (!std::isfinite(rho1)) throw InvalidInput("fit_ma1_from_rho: rho(1) must be finite");
    const Scalar half = Scalar(0.5);
    if (std::abs(rho1) > half + Scalar(1e-15))
        throw NumericalError("fit_ma1_from_rho: no MA(1) attains |rho(1)| > 0.5");
    Ma1Fit<Scalar> fit;
    if (rho1 == Scalar(0)) return fit;
    fit.at_boundary = std::abs(rho1) >= half - Scalar(1e-12);
    const Scalar disc = std::max(Scalar(0), Scalar(1) - Scalar(4) * rho1 * rho1);
    fit.theta1 = (Scalar(1) - std::sqrt(disc)) / (Scalar(2) * rho1);
    return fit;
}

/// Moment fit of a VMA(1): solve Gamma(0) = Theta1 Sigma Theta1^T + Sigma,
/// Gamma(1) = Theta1 Sigma for (Theta1, Sigma) by fixed-point iteration
///   Sigma <- Gamma(0) - Gamma(1) Sigma^{-1} Gamma(1)^T,
/// starting at Sigma = Gamma(0). Diverging or leaving the positive-definite
/// cone means no invertible VMA(1) matches the given moments.
template <typename Scalar>
struct Vma1Fit {
    MatrixX<Scalar> theta1;
    MatrixX<Scalar> sigma;
    int iterations = 0;
};

template <typename DerivedG0, typename DerivedG1,
          typename Scalar = typename DerivedG0::Scalar>
Vma1Fit<Scalar> fit_vma1_moments(const Eigen::MatrixBase<DerivedG0>& gamma0,
                                 const Eigen::MatrixBase<DerivedG1>& gamma1) {
    if (gamma0.rows() != gamma0.cols() || gamma1.rows() != gamma1.cols() ||
        gamma0.rows() != gamma1.rows())
        throw InvalidInput("fit_vma1_moments: matrices must be square of equal size");
    const MatrixX<Scalar> g0 = gamma0;
    const MatrixX<Scalar> g1 = gamma1;
    const Scalar scale = std::max(Scalar(1), g0.norm());
    const Scalar tol = Scalar(1e-10) * scale;
    constexpr int max_iter = 500;

    MatrixX<Scalar> sig = g0;
    Eigen::LLT<MatrixX<Scalar>> llt(sig);
    if (llt.info() != Eigen::Success)
        throw NumericalError("fit_vma1_moments: Gamma(0) is not positive definite");

    Vma1Fit<Scalar> fit;
    bool converged = false;
    for (int m = 1; m <= max_iter; ++m) {
        MatrixX<Scalar> next = g0 - g1 * llt.solve(g1.transpose());
        next = ((next + next.transpose()) / Scalar(2)).eval();
        llt.compute(next);
        if (llt.info() != Eigen::Success)
            throw NumericalError(
                "fit_vma1_moments: iteration left the positive-definite cone; "
                "no invertible VMA(1) matches these moments");
        const Scalar change = (next - sig).norm();
        sig = std::move(next);
        fit.iterations = m;
        if (change < tol) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw NumericalError("fit_vma1_moments: no convergence within 500 iterations");

    fit.sigma = sig;
    fit.theta1 = llt.solve(g1.transpose()).transpose();

    // The fit must reproduce the input moments; failure signals that the
    // moments are not those of an invertible VMA(1).
    const Scalar check_tol = Scalar(1e-8) * scale;
    const MatrixX<Scalar> g0_back = fit.theta1 * fit.sigma * fit.theta1.transpose() + fit.sigma;
    const MatrixX<Scalar> g1_back = fit.theta1 * fit.sigma;
    if ((g0_back - g0).norm() > check_tol || (g1_back - g1).norm() > check_tol)
        throw NumericalError("fit_vma1_moments: fitted model does not reproduce the moments");
    return fit;
}

/// If lambda^T Phi_k is parallel to lambda^T for every coefficient, the
/// portfolio itself follows an AR(p) with the returned scalar coefficients;
/// otherwise absent.
template <typename Scalar>
std::optional<std::vector<Scalar>> reduce_portfolio_var(
    const std::vector<MatrixX<Scalar>>& phi, const Weights<Scalar>& w) {
    const auto& lambda = w.lambda();
    const Scalar ln = lambda.norm();
    if (ln == Scalar(0)) throw InvalidInput("reduce_portfolio_var: zero weight vector");

    std::vector<Scalar> coeffs;
    coeffs.reserve(phi.size());
    for (const auto& p : phi) {
        if (p.rows() != p.cols() || p.rows() != lambda.size())
            throw InvalidInput("reduce_portfolio_var: coefficient dimension mismatch");
        const VectorX<Scalar> v = p.transpose() * lambda;
        const Scalar vn = v.norm();
        if (vn == Scalar(0)) {
            coeffs.push_back(Scalar(0));
            continue;
        }
        const Scalar cosine = v.dot(lambda) / (vn * ln);
        if (!(std::abs(cosine) > Scalar(1) - Scalar(1e-10))) return std::nullopt;
        coeffs.push_back(v.dot(lambda) / (ln * ln));
    }
    return coeffs;
}

/// d-period portfolio volatility under the closing-time covariances versus
/// what the two contemporaneous estimators imply with sqrt(d) scaling.
template <typename Scalar>
struct VolatilityComparison {
    Scalar sigma_closing{};     // sqrt(d a + 2(d-1) b), the true d-period vol
    Scalar sigma_naive{};       // sqrt(d (a + 2b))
    Scalar sigma_newey_west{};  // sqrt(d (a + b))
    Scalar ratio_naive{};       // -> 1 as d grows
    Scalar ratio_newey_west{};  // -> sqrt(a+2b)/sqrt(a+b), 1 only if b = 0
};

template <typename DerivedG0, typename DerivedG1,
          typename Scalar = typename DerivedG0::Scalar>
VolatilityComparison<Scalar> contemporaneous_ratio(const Eigen::MatrixBase<DerivedG0>& gamma0,
                                                   const Eigen::MatrixBase<DerivedG1>& gamma1,
                                                   const Weights<Scalar>& w, long d) {
    if (d < 1) throw InvalidInput("contemporaneous_ratio: requires d >= 1");
    if (gamma0.rows() != gamma0.cols() || gamma1.rows() != gamma1.cols() ||
        gamma0.rows() != gamma1.rows() || gamma0.rows() != w.size())
        throw InvalidInput("contemporaneous_ratio: dimension mismatch");

    const auto& lambda = w.lambda();
    const Scalar a = lambda.dot(gamma0 * lambda);
    const Scalar b = lambda.dot(gamma1 * lambda);
    const Scalar dd = Scalar(static_cast<double>(d));
    const Scalar v_closing = dd * a + Scalar(2) * (dd - Scalar(1)) * b;
    const Scalar v_naive = dd * (a + Scalar(2) * b);
    const Scalar v_nw = dd * (a + b);
    if (!(v_closing > Scalar(0)) || !(v_naive > Scalar(0)) || !(v_nw > Scalar(0)))
        throw NumericalError("contemporaneous_ratio: nonpositive scaled variance");

    VolatilityComparison<Scalar> cmp;
    cmp.sigma_closing = std::sqrt(v_closing);
    cmp.sigma_naive = std::sqrt(v_naive);
    cmp.sigma_newey_west = std::sqrt(v_nw);
    cmp.ratio_naive = cmp.sigma_closing / cmp.sigma_naive;
    cmp.ratio_newey_west = cmp.sigma_closing / cmp.sigma_newey_west;
    return cmp;
}

}  // namespace volscale
