#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "volscale/types.hpp"

namespace volscale {

/// Market of n assets driven by one correlated Brownian motion, each asset
/// observed at its own closing fraction of the day.
template <typename Scalar = double>
class MarketSpec {
  public:
    MarketSpec(MatrixX<Scalar> sigma, VectorX<Scalar> closing_fractions)
        : sigma_(std::move(sigma)), fractions_(std::move(closing_fractions)) {
        if (sigma_.rows() == 0 || sigma_.rows() != sigma_.cols())
            throw InvalidInput("MarketSpec: sigma must be square and nonempty");
        if (fractions_.size() != sigma_.rows())
            throw InvalidInput("MarketSpec: one closing fraction per asset required");
        if (!sigma_.allFinite() || !fractions_.allFinite())
            throw InvalidInput("MarketSpec: entries must be finite");
        if (!detail::is_symmetric(sigma_))
            throw InvalidInput("MarketSpec: sigma must be symmetric");
        if (!detail::is_psd(sigma_))
            throw NumericalError("MarketSpec: sigma must be positive semidefinite");
        for (Eigen::Index i = 0; i < fractions_.size(); ++i) {
            if (fractions_(i) < Scalar(0) || fractions_(i) >= Scalar(1))
                throw InvalidInput("MarketSpec: closing fractions must lie in [0, 1)");
            if (i > 0 && fractions_(i) < fractions_(i - 1))
                throw InvalidInput("MarketSpec: closing fractions must be sorted ascending");
        }
    }

    [[nodiscard]] const MatrixX<Scalar>& sigma() const { return sigma_; }
    [[nodiscard]] const VectorX<Scalar>& closing_fractions() const { return fractions_; }
    [[nodiscard]] Eigen::Index dimension() const { return sigma_.rows(); }

  private:
    MatrixX<Scalar> sigma_;
    VectorX<Scalar> fractions_;
};

/// Exact lag-0 and lag-1 covariances of closing-time returns. All higher
/// lags vanish because return intervals more than one day apart are disjoint.
template <typename Scalar>
struct ClosingCov {
    MatrixX<Scalar> gamma0;
    MatrixX<Scalar> gamma1;  // upper triangular with zero diagonal

    /// As a covariance sequence, zero-padded beyond lag 1.
    [[nodiscard]] CovSequence<Scalar> sequence(int max_lag = 1) const {
        if (max_lag < 1) throw InvalidInput("ClosingCov::sequence: max_lag must be >= 1");
        std::vector<MatrixX<Scalar>> g{gamma0, gamma1};
        for (int k = 2; k <= max_lag; ++k)
            g.push_back(MatrixX<Scalar>::Zero(gamma0.rows(), gamma0.cols()));
        return CovSequence<Scalar>(std::move(g));
    }
};

/// Cov over one day shrinks by the interval overlap 1-|x_i-x_j|; the lost
/// part shows up at lag one on the side of the later-closing asset.
template <typename Scalar>
ClosingCov<Scalar> theoretical_closing_cov(const MarketSpec<Scalar>& spec) {
    const auto n = spec.dimension();
    const auto& x = spec.closing_fractions();
    ClosingCov<Scalar> cov;
    cov.gamma0.resize(n, n);
    cov.gamma1 = MatrixX<Scalar>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const Scalar gap = x(j) - x(i);
            cov.gamma0(i, j) = spec.sigma()(i, j) * (Scalar(1) - std::abs(gap));
            if (gap > Scalar(0)) cov.gamma1(i, j) = gap * spec.sigma()(i, j);
        }
    return cov;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Stream seed for one simulation block; depends only on (master, block), so
/// the execution order of blocks cannot change the output.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t block) {
    return splitmix64(master ^ splitmix64(block + 0x632BE59BD9B4E019ull));
}

/// Grid increments of the driving Brownian motion for one block of
/// steps_per_day steps: column s is factor * xi * sqrt(1/steps_per_day).
template <typename Scalar>
void fill_block_increments(const MatrixX<Scalar>& factor, int steps_per_day,
                           std::uint64_t master_seed, std::uint64_t block,
                           MatrixX<Scalar>& out) {
    std::mt19937_64 eng(substream_seed(master_seed, block));
    std::normal_distribution<Scalar> normal(Scalar(0), Scalar(1));
    const Scalar root_dt = std::sqrt(Scalar(1) / Scalar(steps_per_day));
    VectorX<Scalar> xi(factor.rows());
    out.resize(factor.rows(), steps_per_day);
    for (int s = 0; s < steps_per_day; ++s) {
        for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = normal(eng);
        out.col(s).noalias() = factor * (root_dt * xi);
    }
}

/// Lower-triangular factor of a PSD matrix; pivoted fallback covers the
/// singular case. Eigenvalues below -1e-10 * ||sigma|| are rejected.
template <typename Scalar>
MatrixX<Scalar> psd_factor(const MatrixX<Scalar>& sigma) {
    Eigen::LLT<MatrixX<Scalar>> llt(sigma);
    if (llt.info() == Eigen::Success) return llt.matrixL();

    Eigen::LDLT<MatrixX<Scalar>> ldlt(sigma);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("psd_factor: covariance is not factorizable");
    VectorX<Scalar> d = ldlt.vectorD();
    const Scalar floor = -Scalar(1e-10) * std::max(Scalar(1), sigma.norm());
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d(i) < floor)
            throw NumericalError("psd_factor: covariance is indefinite");
        d(i) = std::max(d(i), Scalar(0));
    }
    MatrixX<Scalar> L = ldlt.matrixL();
    MatrixX<Scalar> factor = L * d.cwiseSqrt().asDiagonal();
    return ldlt.transpositionsP().transpose() * factor;
}

}  // namespace detail

/// Simulated closing-time return panel. Each asset's day-t return is the
/// increment of its Brownian coordinate over [t-1+x_i, t+x_i], assembled
/// from shared grid increments of 1/steps_per_day day. Every closing
/// fraction must lie exactly on the grid. Deterministic given the seed, and
/// independent of evaluation order by the per-block seeding contract.
template <typename Scalar = double>
PanelReturns<Scalar> simulate_panel(const MarketSpec<Scalar>& spec, int days, int steps_per_day,
                                    std::uint64_t seed, std::vector<std::string> labels = {}) {
    if (days < 2) throw InvalidInput("simulate_panel: at least two days required");
    if (steps_per_day < 1) throw InvalidInput("simulate_panel: steps_per_day must be >= 1");
    const auto n = spec.dimension();
    const auto& x = spec.closing_fractions();

    std::vector<long> offset(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const long m = std::lround(static_cast<double>(x(i)) * steps_per_day);
        if (std::abs(x(i) - Scalar(m) / Scalar(steps_per_day)) > Scalar(1e-12) ||
            m >= steps_per_day)
            throw InvalidInput(
                "simulate_panel: closing fraction " + std::to_string(static_cast<double>(x(i))) +
                " is not representable on a grid of " + std::to_string(steps_per_day) +
                " steps per day");
        offset[static_cast<std::size_t>(i)] = m;
    }
    const long max_offset = offset.empty() ? 0 : *std::max_element(offset.begin(), offset.end());

    const MatrixX<Scalar> factor = detail::psd_factor(spec.sigma());

    const long S = steps_per_day;
    const long total = static_cast<long>(days) * S + max_offset;  // grid increments needed
    const long day_span = static_cast<long>(days) * S;
    MatrixX<Scalar> returns = MatrixX<Scalar>::Zero(days, n);
    MatrixX<Scalar> block(n, S);
    for (long b = 0; b * S < total; ++b) {
        detail::fill_block_increments(factor, steps_per_day, seed,
                                      static_cast<std::uint64_t>(b), block);
        const long lo = b * S;
        for (long s = 0; s < S && lo + s < total; ++s) {
            const long g = lo + s;
            for (Eigen::Index i = 0; i < n; ++i) {
                const long idx = g - offset[static_cast<std::size_t>(i)];
                if (idx >= 0 && idx < day_span)
                    returns(idx / S, i) += block(i, s);
            }
        }
    }

    if (labels.empty()) {
        labels.reserve(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) labels.push_back("asset_" + std::to_string(i + 1));
    }
    return PanelReturns<Scalar>(std::move(returns), std::move(labels), "1 day");
}

/// Gaussian law of tomorrow's returns given today's: X_{t+1} | X_t has mean
/// (coefficient * X_t) and the stated covariance.
template <typename Scalar>
struct ConditionalParams {
    MatrixX<Scalar> coefficient;  // Gamma(1) Gamma(0)^{-1}
    MatrixX<Scalar> covariance;   // Gamma(0) - Gamma(1) Gamma(0)^{-1} Gamma(1)^T
};

template <typename Scalar>
ConditionalParams<Scalar> conditional_params(const MarketSpec<Scalar>& spec) {
    const ClosingCov<Scalar> cov = theoretical_closing_cov(spec);
    Eigen::FullPivLU<MatrixX<Scalar>> lu(cov.gamma0.transpose());
    if (!lu.isInvertible())
        throw NumericalError("conditional_params: lag-0 covariance is singular");
    ConditionalParams<Scalar> out;
    out.coefficient = lu.solve(cov.gamma1.transpose()).transpose();
    out.covariance = cov.gamma0 - out.coefficient * cov.gamma1.transpose();
    MatrixX<Scalar>& c = out.covariance;
    c = ((c + c.transpose()) / Scalar(2)).eval();
    return out;
}

}  // namespace volscale
