#pragma once

#include "fit2/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace fit2
{

/// Closed interval [lower, upper] of membership or firing degrees, 0 <= lower <= upper <= 1.
template <typename Scalar>
struct FiringInterval
{
    Scalar lower{0};
    Scalar upper{0};

    Scalar spread() const { return upper - lower; }
};

/// Gaussian primary membership with fixed mean and uncertain width [sigma_lo, sigma_hi].
/// The narrow width yields the lower membership function, the wide one the upper.
template <typename Scalar>
class IT2GaussianMF
{
public:
    IT2GaussianMF() = default;

    // Widths given out of order are swapped.
    IT2GaussianMF(Scalar mean, Scalar sigma_a, Scalar sigma_b)
        : mean_(mean), sigma_lo_(std::min(sigma_a, sigma_b)), sigma_hi_(std::max(sigma_a, sigma_b))
    {
        using std::isfinite;
        if (!isfinite(mean_) || !isfinite(sigma_hi_) || !(sigma_lo_ > Scalar(0)))
            throw ValidationError("IT2GaussianMF: mean must be finite and widths finite and positive");
    }

    Scalar mean() const { return mean_; }
    Scalar sigma_lo() const { return sigma_lo_; }
    Scalar sigma_hi() const { return sigma_hi_; }

    bool operator==(const IT2GaussianMF&) const = default;

private:
    Scalar mean_{0};
    Scalar sigma_lo_{1};
    Scalar sigma_hi_{1};
};

template <typename Scalar>
FiringInterval<Scalar> eval_it2_gaussian(const IT2GaussianMF<Scalar>& mf, Scalar x)
{
    using std::exp;
    using std::isfinite;
    if (!isfinite(x))
        throw ValidationError("eval_it2_gaussian: non-finite input");
    const Scalar d = x - mf.mean();
    const Scalar zl = d / mf.sigma_lo();
    const Scalar zu = d / mf.sigma_hi();
    const Scalar lower = std::max(Scalar(0), Scalar(exp(Scalar(-0.5) * zl * zl)));
    const Scalar upper = std::max(Scalar(0), Scalar(exp(Scalar(-0.5) * zu * zu)));
    return {lower, upper};
}

/// Algebraic-product meet over the antecedents of one rule.
template <typename Scalar, typename Derived>
FiringInterval<Scalar> firing_interval(std::span<const IT2GaussianMF<Scalar>> row,
                                       const Eigen::MatrixBase<Derived>& x)
{
    require_same_size(static_cast<Eigen::Index>(row.size()), x.size(), "firing_interval");
    FiringInterval<Scalar> f{Scalar(1), Scalar(1)};
    for (std::size_t k = 0; k < row.size(); ++k) {
        const auto mu = eval_it2_gaussian(row[k], Scalar(x(static_cast<Eigen::Index>(k))));
        f.lower *= mu.lower;
        f.upper *= mu.upper;
    }
    return f;
}

/// Triangle with feet a, c and peak b.
template <typename Scalar>
struct TriangularMF
{
    Scalar a{-1};
    Scalar b{0};
    Scalar c{1};

    TriangularMF() = default;
    TriangularMF(Scalar a_, Scalar b_, Scalar c_) : a(a_), b(b_), c(c_)
    {
        if (!(a <= b && b <= c))
            throw ValidationError("TriangularMF: feet and peak must satisfy a <= b <= c");
    }
};

template <typename Scalar>
Scalar eval_triangular(const TriangularMF<Scalar>& mf, Scalar x)
{
    if (x <= mf.a || x >= mf.c)
        return x == mf.b ? Scalar(1) : Scalar(0);
    if (x < mf.b)
        return (x - mf.a) / (mf.b - mf.a);
    return (mf.c - x) / (mf.c - mf.b);
}

/// Symmetric IT2 triangle: common peak, lower/upper half-widths
/// half_width*(1 -/+ spread).
template <typename Scalar>
struct IT2TriangularMF
{
    TriangularMF<Scalar> lower;
    TriangularMF<Scalar> upper;

    IT2TriangularMF() = default;
    IT2TriangularMF(Scalar peak, Scalar half_width, Scalar spread)
    {
        if (!(half_width > Scalar(0)) || !(spread >= Scalar(0)) || !(spread < Scalar(1)))
            throw ValidationError("IT2TriangularMF: need half_width > 0 and spread in [0, 1)");
        const Scalar lo = half_width * (Scalar(1) - spread);
        const Scalar hi = half_width * (Scalar(1) + spread);
        lower = TriangularMF<Scalar>(peak - lo, peak, peak + lo);
        upper = TriangularMF<Scalar>(peak - hi, peak, peak + hi);
    }
};

template <typename Scalar>
FiringInterval<Scalar> eval_it2_triangular(const IT2TriangularMF<Scalar>& mf, Scalar x)
{
    return {eval_triangular(mf.lower, x), eval_triangular(mf.upper, x)};
}

/// M rules by N inputs, stored rule-major.
template <typename Scalar>
class AntecedentGridT
{
public:
    AntecedentGridT() = default;

    AntecedentGridT(std::size_t rules, std::size_t inputs, std::vector<IT2GaussianMF<Scalar>> mfs)
        : rules_(rules), inputs_(inputs), mfs_(std::move(mfs))
    {
        if (rules_ == 0 || inputs_ == 0)
            throw ValidationError("AntecedentGrid: need at least one rule and one input");
        if (mfs_.size() != rules_ * inputs_)
            throw DimensionError("AntecedentGrid: membership count is not rules x inputs");
    }

    std::size_t rules() const { return rules_; }
    std::size_t inputs() const { return inputs_; }

    std::span<const IT2GaussianMF<Scalar>> row(std::size_t j) const
    {
        return {mfs_.data() + j * inputs_, inputs_};
    }

    const IT2GaussianMF<Scalar>& operator()(std::size_t j, std::size_t k) const
    {
        return mfs_[j * inputs_ + k];
    }

    const std::vector<IT2GaussianMF<Scalar>>& data() const { return mfs_; }

    bool operator==(const AntecedentGridT&) const = default;

private:
    std::size_t rules_{0};
    std::size_t inputs_{0};
    std::vector<IT2GaussianMF<Scalar>> mfs_;
};

using AntecedentGrid = AntecedentGridT<double>;

/// Firing intervals of every rule for one input vector.
template <typename Scalar, typename Derived>
std::vector<FiringInterval<Scalar>> rule_firings(const AntecedentGridT<Scalar>& grid,
                                                 const Eigen::MatrixBase<Derived>& x)
{
    std::vector<FiringInterval<Scalar>> out(grid.rules());
    for (std::size_t j = 0; j < grid.rules(); ++j)
        out[j] = firing_interval<Scalar>(grid.row(j), x);
    return out;
}

/// Distribution of the random antecedent draw. Means are uniform over the
/// feature range; the base width is a uniform fraction of the range and the
/// FOU spread delta gives sigma = width*(1 -/+ delta).
struct AntecedentInit
{
    double width_min = 0.1;
    double width_max = 1.0;
    double fou_min = 0.1;
    double fou_max = 0.3;
};

struct FeatureRange
{
    double min;
    double max;
};

AntecedentGrid random_init_antecedents(std::size_t rules, std::span<const FeatureRange> ranges, std::uint64_t seed,
                                       const AntecedentInit& init = {});

} // namespace fit2
