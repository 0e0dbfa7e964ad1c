#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace fit2
{

struct CoordinationThresholds
{
    double heading_deg = 5.0;
    double depth_m = 0.05;
    double class_threshold = 0.5;
    std::size_t corner_steps = 3; // n_c

    void validate() const;
};

struct CoordinationSnapshot
{
    double heading_error = 0.0; // deg
    double depth_error = 0.0;   // m
    double smoothed_class = 0.0;
};

struct Predicates
{
    bool heading = false; // P1
    bool depth = false;   // P2
    bool corner = false;  // P3
};

struct BehaviorSet
{
    bool heading = false;
    bool depth = false;
    bool edge = false;
    bool corner_turn = false;

    bool empty() const { return !(heading || depth || edge || corner_turn); }
    /// Bit 0 heading, 1 depth, 2 edge, 3 corner turn.
    std::uint8_t mask() const;
    /// e.g. "heading+edge"; "none" for the empty set.
    std::string names() const;
    bool operator==(const BehaviorSet&) const = default;
};

/// The 8-entry coordination table.
BehaviorSet behavior_table(const Predicates& p);

/// Evaluates P1..P3 and looks the set up. `corner_streak` counts consecutive
/// above-threshold smoothed scores and is updated in place.
BehaviorSet coordinate_behaviors(const CoordinationSnapshot& snapshot, const CoordinationThresholds& thresholds,
                                 std::size_t& corner_streak, Predicates* predicates = nullptr);

} // namespace fit2
