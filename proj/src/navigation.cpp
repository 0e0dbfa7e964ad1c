#include "fit2/navigation.hpp"
#include "fit2/types.hpp"

#include <array>
#include <cmath>

namespace fit2
{

void CoordinationThresholds::validate() const
{
    if (!(heading_deg > 0.0) || !(depth_m > 0.0) || !std::isfinite(heading_deg) || !std::isfinite(depth_m))
        throw ValidationError("coordination thresholds must be positive");
    if (!std::isfinite(class_threshold))
        throw ValidationError("class threshold must be finite");
    if (corner_steps == 0)
        throw ValidationError("corner confirmation needs at least one step");
}

std::uint8_t BehaviorSet::mask() const
{
    return static_cast<std::uint8_t>((heading ? 1 : 0) | (depth ? 2 : 0) | (edge ? 4 : 0) | (corner_turn ? 8 : 0));
}

std::string BehaviorSet::names() const
{
    std::string s;
    auto add = [&](bool on, const char* n) {
        if (!on)
            return;
        if (!s.empty())
            s += '+';
        s += n;
    };
    add(heading, "heading");
    add(depth, "depth");
    add(edge, "edge");
    add(corner_turn, "corner-turn");
    return s.empty() ? "none" : s;
}

BehaviorSet behavior_table(const Predicates& p)
{
    //                               heading depth  edge   corner_turn
    static constexpr std::array<BehaviorSet, 8> table = {{
        {false, false, true, false}, // P1=0 P2=0 P3=0: cruise
        {false, false, false, true}, // P1=0 P2=0 P3=1
        {false, true, true, false},  // P1=0 P2=1 P3=0
        {false, true, false, true},  // P1=0 P2=1 P3=1
        {true, false, true, false},  // P1=1 P2=0 P3=0
        {false, false, false, true}, // P1=1 P2=0 P3=1
        {true, true, true, false},   // P1=1 P2=1 P3=0
        {false, true, false, true},  // P1=1 P2=1 P3=1
    }};
    return table[(p.heading ? 4 : 0) | (p.depth ? 2 : 0) | (p.corner ? 1 : 0)];
}

BehaviorSet coordinate_behaviors(const CoordinationSnapshot& snapshot, const CoordinationThresholds& thresholds,
                                 std::size_t& corner_streak, Predicates* predicates)
{
    if (!std::isfinite(snapshot.heading_error) || !std::isfinite(snapshot.depth_error) ||
        !std::isfinite(snapshot.smoothed_class))
        throw ValidationError("coordinate_behaviors: non-finite snapshot");
    corner_streak = snapshot.smoothed_class >= thresholds.class_threshold ? corner_streak + 1 : 0;
    Predicates p;
    p.heading = std::abs(snapshot.heading_error) >= thresholds.heading_deg;
    p.depth = std::abs(snapshot.depth_error) >= thresholds.depth_m;
    p.corner = corner_streak >= thresholds.corner_steps;
    if (predicates)
        *predicates = p;
    return behavior_table(p);
}

} // namespace fit2
