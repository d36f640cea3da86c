#pragma once

#include "volscale/types.hpp"

namespace volscale {

/// Sample lagged covariance matrices Gamma_hat(0..max_lag) with
///   Gamma_hat(k)_{ij} = (1/T) sum_{t=k+1..T} (x_{t,i} - m_i)(x_{t-k,j} - m_j),
/// m the column means when demean is set, zero otherwise. The divisor is T
/// for every lag, which keeps Gamma_hat(0) positive semi-definite.
template <typename Scalar>
CovSequence<Scalar> sample_acov(const PanelReturns<Scalar>& panel, int max_lag,
                                bool demean = true) {
    const auto T = panel.periods();
    if (max_lag < 0) throw InvalidInput("sample_acov: max_lag must be nonnegative");
    if (max_lag >= T) throw InvalidInput("sample_acov: max_lag must be smaller than T");

    MatrixX<Scalar> centered = panel.values();
    if (demean) centered.rowwise() -= centered.colwise().mean().eval();

    std::vector<MatrixX<Scalar>> gammas;
    gammas.reserve(static_cast<std::size_t>(max_lag) + 1);
    for (int k = 0; k <= max_lag; ++k) {
        const auto rows = T - k;
        MatrixX<Scalar> g =
            centered.bottomRows(rows).transpose() * centered.topRows(rows) / Scalar(T);
        if (k == 0) g = ((g + g.transpose()) / Scalar(2)).eval();  // kill roundoff asymmetry
        gammas.push_back(std::move(g));
    }
    return CovSequence<Scalar>(std::move(gammas));
}

/// Univariate specialization: sample auto-covariances of a single series.
template <typename Derived>
AcfSequence<typename Derived::Scalar> sample_acf(const Eigen::MatrixBase<Derived>& series,
                                                 int max_lag, bool demean = true) {
    using Scalar = typename Derived::Scalar;
    const auto T = series.size();
    if (T < 2) throw InvalidInput("sample_acf: need at least 2 observations");
    if (max_lag < 0) throw InvalidInput("sample_acf: max_lag must be nonnegative");
    if (max_lag >= T) throw InvalidInput("sample_acf: max_lag must be smaller than T");

    VectorX<Scalar> x = series.derived().template cast<Scalar>();
    if (demean) x.array() -= x.mean();

    std::vector<Scalar> gamma(static_cast<std::size_t>(max_lag) + 1, Scalar(0));
    for (int k = 0; k <= max_lag; ++k)
        gamma[static_cast<std::size_t>(k)] =
            x.tail(T - k).dot(x.head(T - k)) / Scalar(T);
    return AcfSequence<Scalar>(std::move(gamma));
}

/// A contemporaneous covariance estimate together with its definiteness.
template <typename Scalar>
struct ContemporaneousEstimate {
    MatrixX<Scalar> matrix;
    bool psd = false;
    Scalar min_eigenvalue{};
};

namespace detail {

template <typename Scalar>
ContemporaneousEstimate<Scalar> finish_estimate(MatrixX<Scalar> m) {
    ContemporaneousEstimate<Scalar> out;
    out.min_eigenvalue = min_eigenvalue(m);
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(
        ((m + m.transpose()) / Scalar(2)).eval(), Eigen::EigenvaluesOnly);
    const Scalar hi = es.eigenvalues().maxCoeff();
    out.psd = out.min_eigenvalue >= Scalar(-1e-10) * std::max(hi, Scalar(0));
    out.matrix = std::move(m);
    return out;
}

}  // namespace detail

/// Gamma(0) + Gamma(1) + Gamma(1)^T. Under pure closing-time effects this
/// recovers the contemporaneous covariance, but it is not guaranteed
/// positive semi-definite; the flag reports which case we are in.
template <typename Scalar>
ContemporaneousEstimate<Scalar> naive_contemporaneous(const CovSequence<Scalar>& cov) {
    if (cov.max_lag() < 1)
        throw InvalidInput("naive_contemporaneous: requires Gamma(0) and Gamma(1)");
    MatrixX<Scalar> g1 = cov.at(1);
    return detail::finish_estimate<Scalar>(cov.at(0) + g1 + g1.transpose());
}

/// Newey-West estimate up to lag one: Gamma(0) + (Gamma(1) + Gamma(1)^T)/2.
/// Symmetric, and positive semi-definite whenever the inputs are valid
/// sample moments.
template <typename Scalar>
ContemporaneousEstimate<Scalar> newey_west_lag1(const CovSequence<Scalar>& cov) {
    if (cov.max_lag() < 1) throw InvalidInput("newey_west_lag1: requires Gamma(0) and Gamma(1)");
    MatrixX<Scalar> g1 = cov.at(1);
    return detail::finish_estimate<Scalar>(cov.at(0) + (g1 + g1.transpose()) / Scalar(2));
}

}  // namespace volscale
