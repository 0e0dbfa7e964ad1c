#pragma once

#include "fit2/fuzzy_core.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace fit2
{

/// Type-reduced interval [y_l, y_r] of a center-of-sets IT2 rule base.
///
/// z_l[j] == 1 means rule j enters the left endpoint with its upper firing,
/// z_l[j] == 0 with its lower firing (and mirrored for z_r), so that
///
///   y = (sum fu*w - sum (1 - z)*dw*w) / (sum fu - sum (1 - z)*dw),  dw = fu - fl.
template <typename Scalar>
struct TypeReducedSetT
{
    Scalar y_l{0};
    Scalar y_r{0};
    std::vector<std::uint8_t> z_l;
    std::vector<std::uint8_t> z_r;
    // Outer passes of the switch loop for each endpoint (0 when no loop ran).
    int sweeps_l{0};
    int sweeps_r{0};
};

using TypeReducedSet = TypeReducedSetT<double>;

template <typename Scalar>
struct ReductionInputT
{
    std::vector<FiringInterval<Scalar>> firings;
    std::vector<Scalar> w;
};

using ReductionInput = ReductionInputT<double>;

template <typename Scalar>
Scalar defuzz(const TypeReducedSetT<Scalar>& r)
{
    return (r.y_l + r.y_r) / Scalar(2);
}

namespace detail
{

template <typename Scalar>
void check_reduction_input(std::span<const FiringInterval<Scalar>> f, std::span<const Scalar> w, const char* who)
{
    if (f.empty())
        throw ValidationError(std::string(who) + ": empty rule base");
    require_same_size(static_cast<Eigen::Index>(f.size()), static_cast<Eigen::Index>(w.size()), who);
    bool any = false;
    for (std::size_t j = 0; j < f.size(); ++j) {
        using std::isfinite;
        if (!isfinite(w[j]) || !(f[j].lower >= Scalar(0)) || !(f[j].upper >= f[j].lower) ||
            !isfinite(f[j].upper))
            throw ValidationError(std::string(who) + ": invalid firing interval or consequent at rule " +
                                  std::to_string(j));
        any = any || f[j].upper > Scalar(0);
    }
    if (!any)
        throw NoRuleFiresError(std::string(who) + ": no rule fires (all upper firings are zero)");
}

template <typename Scalar>
bool all_lower_zero(std::span<const FiringInterval<Scalar>> f)
{
    return std::all_of(f.begin(), f.end(), [](const auto& fi) { return fi.lower == Scalar(0); });
}

// Only upper firings are non-zero: each endpoint is the extreme consequent
// among the rules that fire at all.
template <typename Scalar>
void reduce_upper_only(std::span<const FiringInterval<Scalar>> f, std::span<const Scalar> w,
                       TypeReducedSetT<Scalar>& out)
{
    const std::size_t m = f.size();
    Scalar lo = std::numeric_limits<Scalar>::infinity();
    Scalar hi = -std::numeric_limits<Scalar>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
        if (f[j].upper == Scalar(0))
            continue;
        lo = std::min(lo, w[j]);
        hi = std::max(hi, w[j]);
    }
    out.y_l = lo;
    out.y_r = hi;
    out.z_l.assign(m, 0);
    out.z_r.assign(m, 0);
    for (std::size_t j = 0; j < m; ++j) {
        if (f[j].upper == Scalar(0))
            continue;
        out.z_l[j] = w[j] == lo;
        out.z_r[j] = w[j] == hi;
    }
    out.sweeps_l = out.sweeps_r = 0;
}

// |A| below this is a tie and leaves the indicator alone. Bounds the rounding
// in the running sums, which hold at most m terms of size <= sum_f * max|w|.
template <typename Scalar>
Scalar tie_tolerance(std::size_t m, Scalar delta1, Scalar w_j, Scalar w_absmax)
{
    using std::abs;
    return Scalar(4 * (m + 1)) * std::numeric_limits<Scalar>::epsilon() * delta1 * (abs(w_j) + w_absmax);
}

// Sorting-free switch search for one endpoint. `left` selects y_l (rules
// below the running centroid take their upper firing) or y_r (rules above it).
template <typename Scalar>
Scalar sc_endpoint(std::span<const FiringInterval<Scalar>> f, std::span<const Scalar> w, bool left,
                   std::vector<std::uint8_t>& z, int& sweeps)
{
    using std::abs;
    const std::size_t m = f.size();
    z.assign(m, 1);
    Scalar delta1{0};
    Scalar delta2{0};
    Scalar w_absmax{0};
    for (std::size_t j = 0; j < m; ++j) {
        delta1 += f[j].upper;
        delta2 += f[j].upper * w[j];
        w_absmax = std::max(w_absmax, Scalar(abs(w[j])));
    }

    const int cap = static_cast<int>(m) + 1;
    sweeps = 0;
    bool flag = true;
    while (flag) {
        if (++sweeps > cap)
            throw ConvergenceError("sc_reduce: switch loop exceeded M+1 sweeps");
        flag = false;
        for (std::size_t j = 0; j < m; ++j) {
            const Scalar a = w[j] * delta1 - delta2;
            if (abs(a) <= tie_tolerance(m, delta1, w[j], w_absmax))
                continue;
            const std::uint8_t next = left ? (a < Scalar(0)) : (a > Scalar(0));
            if (next == z[j])
                continue;
            const Scalar dw = f[j].upper - f[j].lower;
            if (z[j] == 1) {
                delta1 -= dw;
                delta2 -= w[j] * dw;
            } else {
                delta1 += dw;
                delta2 += w[j] * dw;
            }
            z[j] = next;
            flag = true;
        }
    }
    return delta2 / delta1;
}

// Classic Karnik-Mendel iteration on consequents sorted ascending.
template <typename Scalar>
Scalar km_endpoint(std::span<const FiringInterval<Scalar>> f, std::span<const Scalar> w,
                   const std::vector<std::size_t>& order, bool left, int& iterations)
{
    const std::size_t n = order.size();
    Scalar num{0};
    Scalar den{0};
    for (std::size_t i : order) {
        const Scalar theta = (f[i].lower + f[i].upper) / Scalar(2);
        num += theta * w[i];
        den += theta;
    }
    Scalar y = num / den;

    // Number of sorted rules at or below y (left) or strictly below y (right).
    auto switch_point = [&](Scalar yy) {
        std::size_t k = 0;
        while (k < n && (left ? w[order[k]] <= yy : w[order[k]] < yy))
            ++k;
        return k;
    };
    auto centroid = [&](std::size_t k) {
        Scalar nn{0};
        Scalar dd{0};
        for (std::size_t p = 0; p < n; ++p) {
            const std::size_t i = order[p];
            const bool upper = left ? p < k : p >= k;
            const Scalar th = upper ? f[i].upper : f[i].lower;
            nn += th * w[i];
            dd += th;
        }
        return nn / dd;
    };

    // The iterates move monotonically toward the endpoint; a step that does
    // not improve it can only come from rounding when y sits on a consequent,
    // so it ends the search instead of cycling.
    const int cap = static_cast<int>(n) + 2;
    iterations = 1;
    std::size_t k = switch_point(y);
    y = centroid(k);
    for (;;) {
        const std::size_t k_next = switch_point(y);
        if (k_next == k)
            break;
        const Scalar y_next = centroid(k_next);
        if (left ? !(y_next < y) : !(y_next > y))
            break;
        if (++iterations > cap)
            throw ConvergenceError("km_reduce: iteration cap exceeded");
        y = y_next;
        k = k_next;
    }
    return y;
}

} // namespace detail

/// SC type reducer: finds both switch-indicator fixed points without sorting
/// the consequents. Each endpoint starts from all-upper firings and flips
/// indicators one rule at a time while keeping the running numerator and
/// denominator in step.
template <typename Scalar>
void sc_reduce_into(std::span<const FiringInterval<Scalar>> f, std::span<const Scalar> w,
                    TypeReducedSetT<Scalar>& out)
{
    detail::check_reduction_input(f, w, "sc_reduce");
    if (detail::all_lower_zero(f)) {
        detail::reduce_upper_only(f, w, out);
        return;
    }
    out.y_l = detail::sc_endpoint(f, w, true, out.z_l, out.sweeps_l);
    out.y_r = detail::sc_endpoint(f, w, false, out.z_r, out.sweeps_r);
}

template <typename Scalar>
TypeReducedSetT<Scalar> sc_reduce(std::span<const FiringInterval<Scalar>> f, std::span<const Scalar> w)
{
    TypeReducedSetT<Scalar> out;
    sc_reduce_into(f, w, out);
    return out;
}

template <typename Scalar>
TypeReducedSetT<Scalar> sc_reduce(const ReductionInputT<Scalar>& in)
{
    return sc_reduce<Scalar>(in.firings, in.w);
}

/// Karnik-Mendel type reducer (original formulation, not EKM). The switch
/// indicators are reported in the same convention as sc_reduce.
template <typename Scalar>
void km_reduce_into(std::span<const FiringInterval<Scalar>> f, std::span<const Scalar> w,
                    TypeReducedSetT<Scalar>& out)
{
    detail::check_reduction_input(f, w, "km_reduce");
    if (detail::all_lower_zero(f)) {
        detail::reduce_upper_only(f, w, out);
        return;
    }
    const std::size_t m = f.size();
    std::vector<std::size_t> order;
    order.reserve(m);
    for (std::size_t j = 0; j < m; ++j)
        if (f[j].upper > Scalar(0))
            order.push_back(j);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });

    out.y_l = detail::km_endpoint(f, w, order, true, out.sweeps_l);
    out.y_r = detail::km_endpoint(f, w, order, false, out.sweeps_r);
    out.z_l.resize(m);
    out.z_r.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        out.z_l[j] = w[j] <= out.y_l;
        out.z_r[j] = w[j] >= out.y_r;
    }
}

template <typename Scalar>
TypeReducedSetT<Scalar> km_reduce(std::span<const FiringInterval<Scalar>> f, std::span<const Scalar> w)
{
    TypeReducedSetT<Scalar> out;
    km_reduce_into(f, w, out);
    return out;
}

template <typename Scalar>
TypeReducedSetT<Scalar> km_reduce(const ReductionInputT<Scalar>& in)
{
    return km_reduce<Scalar>(in.firings, in.w);
}

inline constexpr std::size_t brute_force_max_rules = 20;

template <typename Scalar>
struct Endpoints
{
    Scalar y_l;
    Scalar y_r;
};

/// Exhaustive reference: extremes of the weighted average over all 2^M
/// choices of lower/upper firing per rule.
template <typename Scalar>
Endpoints<Scalar> brute_force_reduce(std::span<const FiringInterval<Scalar>> f, std::span<const Scalar> w)
{
    require_same_size(static_cast<Eigen::Index>(f.size()), static_cast<Eigen::Index>(w.size()),
                      "brute_force_reduce");
    const std::size_t m = f.size();
    if (m == 0 || m > brute_force_max_rules)
        throw ValidationError("brute_force_reduce: rule count must be in [1, 20]");
    Scalar lo = std::numeric_limits<Scalar>::infinity();
    Scalar hi = -std::numeric_limits<Scalar>::infinity();
    bool found = false;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        Scalar num{0};
        Scalar den{0};
        for (std::size_t j = 0; j < m; ++j) {
            const Scalar th = (mask >> j) & 1u ? f[j].upper : f[j].lower;
            num += th * w[j];
            den += th;
        }
        if (den == Scalar(0))
            continue;
        const Scalar y = num / den;
        lo = std::min(lo, y);
        hi = std::max(hi, y);
        found = true;
    }
    if (!found)
        throw NoRuleFiresError("brute_force_reduce: every assignment has zero total firing");
    return {lo, hi};
}

template <typename Scalar>
Endpoints<Scalar> brute_force_reduce(const ReductionInputT<Scalar>& in)
{
    return brute_force_reduce<Scalar>(in.firings, in.w);
}

/// Wu-Mendel uncertainty bounds: outer_l <= y_l <= inner_l and
/// inner_r <= y_r <= outer_r, evaluated in closed form.
template <typename Scalar>
struct WuMendelBounds
{
    Scalar outer_l;
    Scalar inner_l;
    Scalar inner_r;
    Scalar outer_r;

    Scalar y_l() const { return (outer_l + inner_l) / Scalar(2); }
    Scalar y_r() const { return (inner_r + outer_r) / Scalar(2); }
    Scalar output() const { return (y_l() + y_r()) / Scalar(2); }
};

/// Sum of term(i) over i in [0, n), adding the pairs (i, n-1-i) first. The
/// result does not change when the index order is reversed.
template <typename Scalar, typename Term>
Scalar mirrored_sum(std::size_t n, Term term)
{
    Scalar s{0};
    for (std::size_t i = 0; i < n / 2; ++i)
        s += term(i) + term(n - 1 - i);
    if (n % 2 == 1)
        s += term(n / 2);
    return s;
}

template <typename Scalar>
WuMendelBounds<Scalar> wm_bounds(std::span<const FiringInterval<Scalar>> f, std::span<const Scalar> w)
{
    detail::check_reduction_input(f, w, "wm_bounds");
    const std::size_t m = f.size();
    const Scalar sum_lo = mirrored_sum<Scalar>(m, [&](std::size_t i) { return f[i].lower; });
    if (!(sum_lo > Scalar(0)))
        throw NoRuleFiresError("wm_bounds: all lower firings are zero, bounds undefined");
    const Scalar sum_up = mirrored_sum<Scalar>(m, [&](std::size_t i) { return f[i].upper; });
    const Scalar w_min = *std::min_element(w.begin(), w.end());
    const Scalar w_max = *std::max_element(w.begin(), w.end());

    const Scalar c_lo = mirrored_sum<Scalar>(m, [&](std::size_t i) { return f[i].lower * w[i]; }) / sum_lo;
    const Scalar c_up = mirrored_sum<Scalar>(m, [&](std::size_t i) { return f[i].upper * w[i]; }) / sum_up;

    const Scalar scale =
        mirrored_sum<Scalar>(m, [&](std::size_t i) { return f[i].upper - f[i].lower; }) / (sum_up * sum_lo);
    const Scalar lo_above = mirrored_sum<Scalar>(m, [&](std::size_t i) { return f[i].lower * (w[i] - w_min); });
    const Scalar up_below = mirrored_sum<Scalar>(m, [&](std::size_t i) { return f[i].upper * (w_max - w[i]); });
    const Scalar up_above = mirrored_sum<Scalar>(m, [&](std::size_t i) { return f[i].upper * (w[i] - w_min); });
    const Scalar lo_below = mirrored_sum<Scalar>(m, [&](std::size_t i) { return f[i].lower * (w_max - w[i]); });

    auto correction = [&](Scalar a, Scalar b) {
        const Scalar d = a + b;
        return d > Scalar(0) ? scale * (a * b) / d : Scalar(0);
    };

    WuMendelBounds<Scalar> out;
    out.inner_l = std::min(c_lo, c_up);
    out.inner_r = std::max(c_lo, c_up);
    out.outer_l = out.inner_l - correction(lo_above, up_below);
    out.outer_r = out.inner_r + correction(up_above, lo_below);
    return out;
}

template <typename Scalar>
WuMendelBounds<Scalar> wm_bounds(const ReductionInputT<Scalar>& in)
{
    return wm_bounds<Scalar>(in.firings, in.w);
}

} // namespace fit2
