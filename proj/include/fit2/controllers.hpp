#pragma once

#include "fit2/fuzzy_core.hpp"
#include "fit2/type_reduction.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace fit2
{

/// Incremental IT2 fuzzy PD controller configuration.
///
/// Inputs E = G_e e and dE = G_de (e(k) - e(k-1)) are clipped to [-1, 1] and
/// fuzzified by three IT2 triangles (N, Z, P) centred at -1, 0, 1. The nine
/// rules map (E, dE) to consequent singletons; the Wu-Mendel reduced output U
/// drives u(k) = clamp(u(k-1) + G_u U, u_min, u_max).
struct FPDConfig
{
    double gain_e = 1.0;
    double gain_de = 1.0;
    double gain_u = 1.0;
    double u_min = -1.0;
    double u_max = 1.0;
    double fou_spread = 0.2;
    // rule_table[3*i + j] for E term i and dE term j, terms ordered N, Z, P.
    std::array<double, 9> rule_table = {-1.0, -0.5, 0.0, -0.5, 0.0, 0.5, 0.0, 0.5, 1.0};

    void validate() const;

    static FPDConfig heading_default();
    static FPDConfig depth_default();
    static FPDConfig edge_default();
};

struct FPDState
{
    double prev_error = 0.0;
    double prev_output = 0.0;
    std::uint64_t k = 0;
};

struct FPDStep
{
    double u;
    FPDState state;
    double E;
    double dE;
    double U;
};

/// Firing intervals of the nine rules, in rule-table order.
std::array<FiringInterval<double>, 9> fpd_firings(const FPDConfig& cfg, double E, double dE);

/// Type-reduced, defuzzified rule-base output for normalized inputs.
double fpd_output(const FPDConfig& cfg, double E, double dE);

/// One sample of the incremental controller, driven by an error value.
FPDStep controller_step_error(const FPDConfig& cfg, const FPDState& state, double error);

/// One sample with e = y_ref - y_f.
FPDStep controller_step(const FPDConfig& cfg, const FPDState& state, double y_ref, double y_f);

/// Wraps to [0, 360).
double wrap_degrees(double deg);

/// Shortest signed arc from `from` to `to`, in (-180, 180].
double angle_difference(double to, double from);

/// beta_ref = beta_cp + theta_m, wrapped to [0, 360).
double heading_reference(double heading_deg, double theta_m_deg);

enum class BehaviorKind
{
    heading,
    depth,
    edge
};

struct SensorSnapshot
{
    std::optional<double> heading;    // compass, degrees
    std::optional<double> depth;      // metres
    std::optional<double> edge_range; // single beam d_c, metres
};

struct BehaviorTargets
{
    double heading_ref = 0.0;
    double depth_ref = 0.0;
    double edge_distance = 0.65;
};

/// heading: shortest arc beta_ref - beta_cp; depth: d_ref - d_rov; edge: d_w - d_c.
double behavior_error(BehaviorKind kind, const SensorSnapshot& sensors, const BehaviorTargets& targets);

} // namespace fit2
