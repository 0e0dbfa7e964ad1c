#pragma once

#include "fit2/felm_training.hpp"
#include "fit2/rng.hpp"
#include "fit2/tsk_inference.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fit2
{

/// Rectangular tank. Walls are numbered counterclockwise seen from above:
/// 1 is y = 0, 2 is x = width, 3 is y = length, 4 is x = 0.
struct TankGeometry
{
    double width = 2.5;
    double length = 2.5;
    double depth = 3.5;
    double corner_radius = 0.45;

    void validate() const;
    double diagonal() const;
    /// Perpendicular distance from (x, y) to a wall.
    double wall_distance(int wall, double x, double y) const;
    /// Corners in counterclockwise order starting at the origin.
    std::array<Eigen::Vector2d, 4> corners() const;
};

enum class Direction
{
    clockwise,
    anticlockwise
};

std::string to_string(Direction d);
Direction direction_from_string(const std::string& name);

/// +1 when the followed wall is on the port side (clockwise circuits), -1 for starboard.
int wall_side(Direction d);
/// Travel heading (degrees, counterclockwise from +x) along a wall.
double wall_heading(int wall, Direction d);
/// Wall whose travel heading is nearest to `heading`.
int wall_for_heading(double heading, Direction d);
int next_wall(int wall, Direction d);

struct VehicleLimits
{
    double max_speed = 0.03;         // m/s
    double max_yaw_rate = 20.0;      // deg/s
    double max_vertical_speed = 0.1; // m/s
    double time_constant = 0.5;      // s
    double hull_radius = 0.2;        // m

    void validate() const;
};

struct VehicleState
{
    double x = 1.25;
    double y = 1.25;
    double depth = 0.0;
    double heading = 0.0; // deg in [0, 360)
    double speed = 0.0;
    double yaw_rate = 0.0;
    double vertical_speed = 0.0;
    double t = 0.0;
    bool collided = false;
};

struct Commands
{
    double yaw = 0.0;
    double surge = 0.0;
    double heave = 0.0;
};

/// First-order lag from each command to its rate, then Euler integration.
/// Positions are clamped to the tank; a clamp in the plane or at the floor
/// sets `collided` for this step.
VehicleState step_vehicle(const VehicleState& state, const Commands& commands, double dt,
                          const VehicleLimits& limits, const TankGeometry& tank);

inline constexpr std::array<double, 5> default_beam_angles = {180.0, 172.0, 164.0, 156.0, 148.0};

/// Beam angles are measured so that `datum + 90` points straight at the
/// followed wall; `side` selects port (+1) or starboard (-1).
struct SonarConfig
{
    std::array<double, 5> beam_angles = default_beam_angles;
    double datum = 90.0;
    int side = 1;

    void validate() const;
};

struct SonarScan
{
    std::array<double, 5> ranges{};
    double t = 0.0;
    ContourClass truth = ContourClass::wall;

    Vector features() const;
};

/// Absolute bearing of a beam for a given vehicle heading.
double beam_bearing(const SonarConfig& sonar, double heading, std::size_t beam);

/// Distance from (x, y) to the tank boundary along `bearing` degrees.
double ray_range(const TankGeometry& tank, double x, double y, double bearing);

std::array<double, 5> exact_ranges(const VehicleState& state, const TankGeometry& tank, const SonarConfig& sonar);

/// Corner iff the noise-free beam hits land on both walls meeting at a tank
/// corner and that corner lies within corner_radius of the polyline through
/// the hit points. A corner the fan does not reach is invisible in the ranges,
/// so proximity alone does not count.
ContourClass contour_label(const VehicleState& state, const TankGeometry& tank, const SonarConfig& sonar);

SonarScan simulate_sonar(const VehicleState& state, const TankGeometry& tank, const SonarConfig& sonar, double sigma,
                         Rng& rng);

/// Heading correction theta_m: offset of the minimum-range beam from the
/// wall-normal beam, signed so that heading + theta_m is parallel to the wall.
double min_range_offset(const std::array<double, 5>& ranges, const SonarConfig& sonar);

struct DatasetSpec
{
    std::size_t wall = 400;
    std::size_t corner = 388;
    double sigma = 0.02;
    std::uint64_t seed = 1;
    Direction direction = Direction::clockwise;
    double offset_min = 0.4;
    double offset_max = 1.6;
    double heading_jitter = 10.0; // deg, uniform +/-
    double turn_fraction = 0.3;   // share of poses rotated part way through a corner turn
    std::size_t max_draws = 2000000;

    void validate(const TankGeometry& tank, const VehicleLimits& limits) const;
};

struct GeneratedDataset
{
    Dataset data;
    std::vector<VehicleState> poses;
};

/// Rejection-samples wall-following poses until both class counts are met.
GeneratedDataset generate_dataset(const TankGeometry& tank, const SonarConfig& sonar, const DatasetSpec& spec,
                                  const VehicleLimits& limits = {});

} // namespace fit2
