#include "fit2/controllers.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace fit2
{

void FPDConfig::validate() const
{
    for (double g : {gain_e, gain_de, gain_u})
        if (!std::isfinite(g))
            throw ValidationError("FPDConfig: gains must be finite");
    if (!std::isfinite(u_min) || !std::isfinite(u_max) || !(u_min < u_max))
        throw ValidationError("FPDConfig: need finite u_min < u_max");
    if (!(fou_spread >= 0.0) || !(fou_spread < 1.0))
        throw ValidationError("FPDConfig: FOU spread must lie in [0, 1)");
    for (double c : rule_table)
        if (!std::isfinite(c))
            throw ValidationError("FPDConfig: rule consequents must be finite");
}

// Gains are per unit of the behavior's error: degrees for heading, metres
// for depth and edge distance. In small-signal terms the loop acts as PI with
// Kp = G_u G_de / 2 per sample and Ki = G_u G_e / 2 per sample.
FPDConfig FPDConfig::heading_default()
{
    FPDConfig c;
    c.gain_e = 0.001;
    c.gain_de = 0.1;
    c.gain_u = 1.0;
    return c;
}

FPDConfig FPDConfig::depth_default()
{
    FPDConfig c;
    c.gain_e = 0.02;
    c.gain_de = 4.0;
    c.gain_u = 1.0;
    return c;
}

FPDConfig FPDConfig::edge_default()
{
    FPDConfig c;
    c.gain_e = 0.01;
    c.gain_de = 2.0;
    c.gain_u = 3.5;
    return c;
}

std::array<FiringInterval<double>, 9> fpd_firings(const FPDConfig& cfg, double E, double dE)
{
    static constexpr double peaks[3] = {-1.0, 0.0, 1.0};
    std::array<FiringInterval<double>, 3> fe{};
    std::array<FiringInterval<double>, 3> fd{};
    for (int t = 0; t < 3; ++t) {
        const IT2TriangularMF<double> mf(peaks[t], 1.0, cfg.fou_spread);
        fe[t] = eval_it2_triangular(mf, E);
        fd[t] = eval_it2_triangular(mf, dE);
    }
    std::array<FiringInterval<double>, 9> out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out[3 * i + j] = {fe[i].lower * fd[j].lower, fe[i].upper * fd[j].upper};
    return out;
}

double fpd_output(const FPDConfig& cfg, double E, double dE)
{
    const auto f = fpd_firings(cfg, E, dE);
    const std::span<const FiringInterval<double>> fs(f);
    const std::span<const double> ws(cfg.rule_table);
    const auto b = wm_bounds<double>(fs, ws);
#ifndef NDEBUG
    const auto km = km_reduce<double>(fs, ws);
    const double tol = 1e-9 * (1.0 + std::abs(km.y_l) + std::abs(km.y_r));
    assert(b.outer_l <= km.y_l + tol && km.y_l <= b.inner_l + tol);
    assert(b.inner_r <= km.y_r + tol && km.y_r <= b.outer_r + tol);
#endif
    return b.output();
}

FPDStep controller_step_error(const FPDConfig& cfg, const FPDState& state, double error)
{
    if (!std::isfinite(error))
        throw ValidationError("controller_step: non-finite measurement");
    const double de = error - state.prev_error;
    FPDStep s{};
    s.E = std::clamp(cfg.gain_e * error, -1.0, 1.0);
    s.dE = std::clamp(cfg.gain_de * de, -1.0, 1.0);
    s.U = fpd_output(cfg, s.E, s.dE);
    s.u = std::clamp(state.prev_output + cfg.gain_u * s.U, cfg.u_min, cfg.u_max);
    s.state = {error, s.u, state.k + 1};
    return s;
}

FPDStep controller_step(const FPDConfig& cfg, const FPDState& state, double y_ref, double y_f)
{
    if (!std::isfinite(y_ref) || !std::isfinite(y_f))
        throw ValidationError("controller_step: non-finite measurement");
    return controller_step_error(cfg, state, y_ref - y_f);
}

double wrap_degrees(double deg)
{
    if (!std::isfinite(deg))
        throw ValidationError("wrap_degrees: non-finite angle");
    double r = std::fmod(deg, 360.0);
    if (r < 0.0)
        r += 360.0;
    return r >= 360.0 ? 0.0 : r;
}

double angle_difference(double to, double from)
{
    double d = wrap_degrees(to - from);
    if (d > 180.0)
        d -= 360.0;
    return d;
}

double heading_reference(double heading_deg, double theta_m_deg)
{
    return wrap_degrees(heading_deg + theta_m_deg);
}

double behavior_error(BehaviorKind kind, const SensorSnapshot& sensors, const BehaviorTargets& targets)
{
    auto need = [](const std::optional<double>& v, const char* what) {
        if (!v || !std::isfinite(*v))
            throw ValidationError(std::string("behavior_error: missing or invalid ") + what + " reading");
        return *v;
    };
    switch (kind) {
    case BehaviorKind::heading:
        return angle_difference(targets.heading_ref, need(sensors.heading, "compass"));
    case BehaviorKind::depth:
        return targets.depth_ref - need(sensors.depth, "depth");
    case BehaviorKind::edge:
        return targets.edge_distance - need(sensors.edge_range, "edge-distance");
    }
    throw ValidationError("behavior_error: unknown behavior");
}

} // namespace fit2
