#pragma once

#include "volscale/types.hpp"

namespace volscale {

/// Scalar ARMA(p, q) coefficients with innovation variance sigma2.
template <typename Scalar>
class ScalarArma {
public:
    ScalarArma(std::vector<Scalar> phi, std::vector<Scalar> theta, Scalar sigma2)
        : phi_(std::move(phi)), theta_(std::move(theta)), sigma2_(sigma2) {
        if (!(sigma2_ > Scalar(0))) throw InvalidInput("ScalarArma: sigma2 must be positive");
        for (Scalar c : phi_)
            if (!std::isfinite(c)) throw InvalidInput("ScalarArma: non-finite AR coefficient");
        for (Scalar c : theta_)
            if (!std::isfinite(c)) throw InvalidInput("ScalarArma: non-finite MA coefficient");
        if (!phi_.empty()) {
            std::vector<MatrixX<Scalar>> blocks;
            blocks.reserve(phi_.size());
            for (Scalar c : phi_) blocks.push_back(MatrixX<Scalar>::Constant(1, 1, c));
            if (!(spectral_radius(companion_matrix(blocks)) < Scalar(1) - Scalar(1e-12)))
                throw InvalidInput("ScalarArma: AR polynomial is not stationary");
        }
    }

    int p() const { return static_cast<int>(phi_.size()); }
    int q() const { return static_cast<int>(theta_.size()); }
    const std::vector<Scalar>& phi() const { return phi_; }
    const std::vector<Scalar>& theta() const { return theta_; }
    Scalar sigma2() const { return sigma2_; }

private:
    std::vector<Scalar> phi_;
    std::vector<Scalar> theta_;
    Scalar sigma2_;
};

namespace detail {

/// d * gamma(0) + 2 * sum_{k=1}^{d-1} (d-k) * gamma(k), the variance of the
/// d-period sum. Lags beyond the stored range count as zero.
template <typename Scalar>
Scalar horizon_variance(const AcfSequence<Scalar>& acf, int d) {
    if (d < 1) throw InvalidInput("holding period d must be at least 1");
    Scalar v = Scalar(d) * acf.gamma(0);
    const int top = std::min(d - 1, acf.max_lag());
    for (int k = 1; k <= top; ++k) v += Scalar(2) * Scalar(d - k) * acf.gamma(k);
    return v;
}

}  // namespace detail

/// Volatility of the d-period return from the auto-covariance function:
/// sqrt(d*gamma(0) + 2*sum_{k=1}^{d-1} (d-k)*gamma(k)).
template <typename Scalar>
Scalar sigma_d_from_acov(const AcfSequence<Scalar>& acf, int d) {
    const Scalar v = detail::horizon_variance(acf, d);
    if (v < Scalar(0)) {
        std::ostringstream os;
        os << "sigma_d_from_acov: negative variance at d = " << d
           << " (inconsistent auto-covariance sequence)";
        throw NumericalError(os.str());
    }
    return std::sqrt(v);
}

/// Scaling factor delta(d) = sqrt(d + 2*sum_{k=1}^{d-1} (d-k)*rho(k)),
/// so that sigma(d) = sigma(1) * delta(d). delta(1) == 1.
template <typename Scalar>
Scalar delta_d(const AcfSequence<Scalar>& acf, int d) {
    const Scalar v = detail::horizon_variance(acf, d) / acf.gamma(0);
    if (v < Scalar(0)) {
        std::ostringstream os;
        os << "delta_d: negative radicand at d = " << d
           << " (inconsistent auto-correlation sequence)";
        throw NumericalError(os.str());
    }
    return std::sqrt(v);
}

/// Worst-case ratio of the true scaling factor to the square-root-of-time
/// value: delta(d)/sqrt(d) <= sqrt(d) for any correlations bounded by one.
inline double sqrt_rule_error_bound(int d) {
    if (d < 2) throw InvalidInput("sqrt_rule_error_bound: requires d >= 2");
    return std::sqrt(static_cast<double>(d));
}

/// MA(q) auto-covariances with theta_0 = 1:
///   gamma(k) = sigma2 * sum_{j=0}^{q-k} theta_j theta_{j+k},  zero past q.
template <typename Scalar>
AcfSequence<Scalar> ma_q_acov(const ScalarArma<Scalar>& model, int max_lag) {
    if (model.p() != 0) throw InvalidInput("ma_q_acov: model must have no AR part");
    if (max_lag < 0) throw InvalidInput("ma_q_acov: max_lag must be nonnegative");
    const int q = model.q();
    std::vector<Scalar> theta(static_cast<std::size_t>(q) + 1);
    theta[0] = Scalar(1);
    for (int j = 1; j <= q; ++j) theta[static_cast<std::size_t>(j)] = model.theta()[j - 1];

    std::vector<Scalar> gamma(static_cast<std::size_t>(max_lag) + 1, Scalar(0));
    for (int k = 0; k <= std::min(max_lag, q); ++k) {
        Scalar s = Scalar(0);
        for (int j = 0; j + k <= q; ++j) s += theta[j] * theta[j + k];
        gamma[static_cast<std::size_t>(k)] = model.sigma2() * s;
    }
    return AcfSequence<Scalar>(std::move(gamma));
}

/// Closed-form MA(1) scaling factor sqrt(d + 2(d-1) * theta1/(1+theta1^2)).
template <typename Scalar>
Scalar ma1_delta_d(Scalar theta1, int d) {
    if (d < 1) throw InvalidInput("ma1_delta_d: requires d >= 1");
    const Scalar rho1 = theta1 / (Scalar(1) + theta1 * theta1);
    return std::sqrt(Scalar(d) + Scalar(2) * Scalar(d - 1) * rho1);
}

/// AR(1) auto-covariances gamma(k) = phi1^k * sigma2 / (1 - phi1^2).
template <typename Scalar>
AcfSequence<Scalar> ar1_acov(Scalar phi1, Scalar sigma2, int max_lag) {
    if (!(std::abs(phi1) < Scalar(1)))
        throw InvalidInput("ar1_acov: |phi1| must be below 1 (stationarity)");
    if (!(sigma2 > Scalar(0))) throw InvalidInput("ar1_acov: sigma2 must be positive");
    if (max_lag < 0) throw InvalidInput("ar1_acov: max_lag must be nonnegative");
    const Scalar gamma0 = sigma2 / (Scalar(1) - phi1 * phi1);
    std::vector<Scalar> gamma(static_cast<std::size_t>(max_lag) + 1);
    Scalar pow = Scalar(1);
    for (int k = 0; k <= max_lag; ++k, pow *= phi1) gamma[static_cast<std::size_t>(k)] = pow * gamma0;
    return AcfSequence<Scalar>(std::move(gamma));
}

/// Closed-form AR(1) scaling factor
///   sqrt(d + 2*phi1/(phi1-1)^2 * (d(1-phi1) + phi1^d - 1)).
/// phi1 == 0 is returned as sqrt(d) directly; the closed form is a 0/0-style
/// cancellation there.
template <typename Scalar>
Scalar ar1_delta_d(Scalar phi1, int d) {
    if (!(std::abs(phi1) < Scalar(1)))
        throw InvalidInput("ar1_delta_d: |phi1| must be below 1 (stationarity)");
    if (d < 1) throw InvalidInput("ar1_delta_d: requires d >= 1");
    if (phi1 == Scalar(0)) return std::sqrt(Scalar(d));
    const Scalar den = (phi1 - Scalar(1)) * (phi1 - Scalar(1));
    const Scalar v = Scalar(d) + Scalar(2) * phi1 / den *
                                     (Scalar(d) * (Scalar(1) - phi1) +
                                      std::pow(phi1, Scalar(d)) - Scalar(1));
    return std::sqrt(v);
}

}  // namespace volscale
