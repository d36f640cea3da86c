#pragma once

#include "volscale/scaling.hpp"
#include "volscale/types.hpp"

namespace volscale {

/// Auto-covariance structure of a weighted portfolio: the portfolio ACF
/// gamma(k) = lambda^T Gamma(k) lambda alongside the asset-vs-portfolio
/// covariances gamma_i(k) = (Gamma(k) lambda)_i, one column per lag.
template <typename Scalar>
struct PortfolioCov {
    AcfSequence<Scalar> acf;
    MatrixX<Scalar> asset_cov;  // n x (max_lag+1); asset_cov(i, k) = gamma_i(k)

    Scalar gamma_i(Eigen::Index i, int k) const { return asset_cov(i, k); }
};

template <typename Scalar>
PortfolioCov<Scalar> portfolio_acov(const CovSequence<Scalar>& cov, const Weights<Scalar>& w) {
    if (w.size() != cov.dimension())
        throw InvalidInput("portfolio_acov: weight dimension does not match covariance dimension");
    const auto& lambda = w.lambda();
    const int K = cov.max_lag();

    MatrixX<Scalar> asset_cov(cov.dimension(), K + 1);
    std::vector<Scalar> gamma(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) {
        asset_cov.col(k) = cov.at(k) * lambda;
        gamma[static_cast<std::size_t>(k)] = lambda.dot(asset_cov.col(k));
    }
    return PortfolioCov<Scalar>{AcfSequence<Scalar>(std::move(gamma)), std::move(asset_cov)};
}

/// One-period Euler contributions sigma_i = lambda_i (Gamma(0) lambda)_i / sigma(lambda).
/// They sum to the portfolio volatility exactly (full allocation).
template <typename DerivedM, typename Scalar = typename DerivedM::Scalar>
VectorX<Scalar> euler_contrib_1d(const Eigen::MatrixBase<DerivedM>& cov0,
                                 const Weights<Scalar>& w) {
    if (cov0.rows() != cov0.cols() || cov0.rows() != w.size())
        throw InvalidInput("euler_contrib_1d: dimension mismatch");
    const auto& lambda = w.lambda();
    const VectorX<Scalar> marginal = cov0 * lambda;
    const Scalar variance = lambda.dot(marginal);
    if (!(variance > Scalar(0)))
        throw NumericalError("euler_contrib_1d: portfolio variance is not positive");
    return lambda.cwiseProduct(marginal) / std::sqrt(variance);
}

/// Per-asset scaling factors delta(i, d) with an explicit defined/undefined
/// flag; the factor does not exist for assets with gamma_i(0) == 0.
template <typename Scalar>
struct PerAssetScaling {
    VectorX<Scalar> value;  // NaN where undefined
    std::vector<bool> defined;
};

/// d-period Euler contributions
///   sigma_i(lambda, d) = lambda_i / sigma(lambda, d)
///                        * (d*gamma_i(0) + 2*sum_{k=1}^{d-1} (d-k)*gamma_i(k)).
/// Lags beyond the stored covariance sequence count as zero.
template <typename Scalar>
ContributionReport<Scalar> contrib_d(const CovSequence<Scalar>& cov, const Weights<Scalar>& w,
                                     int d) {
    if (d < 1) throw InvalidInput("contrib_d: requires d >= 1");
    const PortfolioCov<Scalar> pc = portfolio_acov(cov, w);
    const Scalar sigma_total = sigma_d_from_acov(pc.acf, d);
    if (!(sigma_total > Scalar(0)))
        throw NumericalError("contrib_d: portfolio volatility is not positive");

    const auto& lambda = w.lambda();
    const int top = std::min(d - 1, cov.max_lag());
    VectorX<Scalar> numer = Scalar(d) * pc.asset_cov.col(0);
    for (int k = 1; k <= top; ++k) numer += Scalar(2) * Scalar(d - k) * pc.asset_cov.col(k);

    ContributionHorizon<Scalar> h;
    h.horizon = d;
    h.sigma_portfolio = sigma_total;
    h.sigma = lambda.cwiseProduct(numer) / sigma_total;
    h.share = h.sigma / sigma_total;

    // delta(i, d), undefined where the asset has no lag-zero covariance
    // with the portfolio.
    const Scalar dlt = delta_d(pc.acf, d);
    const auto n = lambda.size();
    h.delta = VectorX<Scalar>::Constant(n, std::numeric_limits<Scalar>::quiet_NaN());
    h.delta_defined.assign(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Scalar gi0 = pc.asset_cov(i, 0);
        if (gi0 == Scalar(0)) continue;
        h.delta(i) = (numer(i) / gi0) / dlt;
        h.delta_defined[static_cast<std::size_t>(i)] = true;
    }

    ContributionReport<Scalar> report;
    report.horizons.push_back(std::move(h));
    return report;
}

/// Scaling factors for contributions:
///   delta(i, d) = (d + (2/gamma_i(0)) * sum_{k=1}^{d-1} (d-k)*gamma_i(k)) / delta(d),
/// so that sigma_i(lambda, d) = sigma_i(lambda) * delta(i, d).
template <typename Scalar>
PerAssetScaling<Scalar> delta_i_d(const CovSequence<Scalar>& cov, const Weights<Scalar>& w,
                                  int d) {
    if (d < 1) throw InvalidInput("delta_i_d: requires d >= 1");
    const PortfolioCov<Scalar> pc = portfolio_acov(cov, w);
    const Scalar dlt = delta_d(pc.acf, d);
    const int top = std::min(d - 1, cov.max_lag());

    const auto n = cov.dimension();
    PerAssetScaling<Scalar> out;
    out.value = VectorX<Scalar>::Constant(n, std::numeric_limits<Scalar>::quiet_NaN());
    out.defined.assign(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Scalar gi0 = pc.asset_cov(i, 0);
        if (gi0 == Scalar(0)) continue;
        Scalar acc = Scalar(d);
        for (int k = 1; k <= top; ++k)
            acc += Scalar(2) / gi0 * Scalar(d - k) * pc.asset_cov(i, k);
        out.value(i) = acc / dlt;
        out.defined[static_cast<std::size_t>(i)] = true;
    }
    return out;
}

/// Convenience builder: one report covering several holding periods.
template <typename Scalar>
ContributionReport<Scalar> contribution_report(const CovSequence<Scalar>& cov,
                                               const Weights<Scalar>& w,
                                               const std::vector<int>& horizons) {
    ContributionReport<Scalar> report;
    for (int d : horizons) {
        ContributionReport<Scalar> one = contrib_d(cov, w, d);
        report.horizons.push_back(std::move(one.horizons.front()));
    }
    return report;
}

/// Scaling table for several holding periods from a portfolio ACF.
template <typename Scalar>
ScalingReport<Scalar> scaling_report(const AcfSequence<Scalar>& acf,
                                     const std::vector<int>& horizons) {
    ScalingReport<Scalar> report;
    report.sigma_1 = std::sqrt(acf.gamma(0));
    for (int d : horizons) {
        ScalingRow<Scalar> row;
        row.horizon = d;
        row.sigma_d = sigma_d_from_acov(acf, d);
        row.delta_d = delta_d(acf, d);
        row.sqrt_d = std::sqrt(Scalar(d));
        row.ratio = row.delta_d / row.sqrt_d;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace volscale
