#include "fit2/simulator.hpp"
#include "fit2/controllers.hpp"
#include "fit2/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fit2
{

namespace
{

constexpr double deg2rad = std::numbers::pi / 180.0;

void check_wall(int wall)
{
    if (wall < 1 || wall > 4)
        throw ValidationError("wall id must be 1..4, got " + std::to_string(wall));
}

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b)
{
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (a + t * ab - p).norm();
}

int nearest_wall(const TankGeometry& tank, const Eigen::Vector2d& p)
{
    int best = 1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int w = 1; w <= 4; ++w) {
        const double d = std::abs(tank.wall_distance(w, p.x(), p.y()));
        if (d < best_d) {
            best_d = d;
            best = w;
        }
    }
    return best;
}

void check_inside(const VehicleState& s, const TankGeometry& tank)
{
    if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.heading) || s.x < 0.0 ||
        s.x > tank.width || s.y < 0.0 || s.y > tank.length || s.depth < 0.0 || s.depth > tank.depth)
        throw ValidationError("vehicle state outside the tank");
}

} // namespace

void TankGeometry::validate() const
{
    if (!(width > 0.0) || !(length > 0.0) || !(depth > 0.0) || !std::isfinite(width) || !std::isfinite(length) ||
        !std::isfinite(depth))
        throw ValidationError("tank dimensions must be positive and finite");
    if (!(corner_radius > 0.0) || !std::isfinite(corner_radius))
        throw ValidationError("corner radius must be positive");
}

double TankGeometry::diagonal() const
{
    return std::hypot(width, length);
}

double TankGeometry::wall_distance(int wall, double x, double y) const
{
    check_wall(wall);
    switch (wall) {
    case 1:
        return y;
    case 2:
        return width - x;
    case 3:
        return length - y;
    default:
        return x;
    }
}

std::array<Eigen::Vector2d, 4> TankGeometry::corners() const
{
    return {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(width, 0.0), Eigen::Vector2d(width, length),
            Eigen::Vector2d(0.0, length)};
}

std::string to_string(Direction d)
{
    return d == Direction::clockwise ? "clockwise" : "anticlockwise";
}

Direction direction_from_string(const std::string& name)
{
    if (name == "clockwise")
        return Direction::clockwise;
    if (name == "anticlockwise")
        return Direction::anticlockwise;
    throw ValidationError("unknown direction '" + name + "' (expected clockwise or anticlockwise)");
}

int wall_side(Direction d)
{
    return d == Direction::clockwise ? 1 : -1;
}

double wall_heading(int wall, Direction d)
{
    check_wall(wall);
    const double ccw = 90.0 * (wall - 1);
    return d == Direction::anticlockwise ? ccw : wrap_degrees(ccw + 180.0);
}

int wall_for_heading(double heading, Direction d)
{
    int best = 1;
    double best_err = 360.0;
    for (int w = 1; w <= 4; ++w) {
        const double err = std::abs(angle_difference(wall_heading(w, d), heading));
        if (err < best_err) {
            best_err = err;
            best = w;
        }
    }
    return best;
}

int next_wall(int wall, Direction d)
{
    check_wall(wall);
    return d == Direction::anticlockwise ? wall % 4 + 1 : (wall + 2) % 4 + 1;
}

void VehicleLimits::validate() const
{
    for (double v : {max_speed, max_yaw_rate, max_vertical_speed, time_constant})
        if (!(v > 0.0) || !std::isfinite(v))
            throw ValidationError("vehicle limits must be positive and finite");
    if (!(hull_radius >= 0.0))
        throw ValidationError("hull radius must be non-negative");
}

VehicleState step_vehicle(const VehicleState& state, const Commands& commands, double dt,
                          const VehicleLimits& limits, const TankGeometry& tank)
{
    for (double c : {commands.yaw, commands.surge, commands.heave})
        if (!std::isfinite(c) || c < -1.0 || c > 1.0)
            throw ValidationError("step_vehicle: commands must lie in [-1, 1]");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ValidationError("step_vehicle: dt must be positive");

    const double a = 1.0 - std::exp(-dt / limits.time_constant);
    VehicleState s = state;
    s.speed += a * (commands.surge * limits.max_speed - s.speed);
    s.yaw_rate += a * (commands.yaw * limits.max_yaw_rate - s.yaw_rate);
    s.vertical_speed += a * (commands.heave * limits.max_vertical_speed - s.vertical_speed);

    const double h = state.heading * deg2rad;
    s.x += s.speed * std::cos(h) * dt;
    s.y += s.speed * std::sin(h) * dt;
    s.heading = wrap_degrees(state.heading + s.yaw_rate * dt);
    s.depth += s.vertical_speed * dt;
    s.t = state.t + dt;

    s.collided = false;
    const double r = std::min({limits.hull_radius, tank.width / 2.0, tank.length / 2.0});
    const double cx = std::clamp(s.x, r, tank.width - r);
    const double cy = std::clamp(s.y, r, tank.length - r);
    if (cx != s.x || cy != s.y) {
        s.collided = true;
        s.x = cx;
        s.y = cy;
    }
    if (s.depth > tank.depth) {
        s.collided = true;
        s.depth = tank.depth;
        s.vertical_speed = 0.0;
    }
    if (s.depth < 0.0) {
        s.depth = 0.0;
        s.vertical_speed = 0.0;
    }
    return s;
}

void SonarConfig::validate() const
{
    if (side != 1 && side != -1)
        throw ValidationError("sonar side must be +1 (port) or -1 (starboard)");
    for (double a : beam_angles)
        if (!std::isfinite(a))
            throw ValidationError("sonar beam angles must be finite");
    if (!std::isfinite(datum))
        throw ValidationError("sonar datum must be finite");
}

Vector SonarScan::features() const
{
    return Eigen::Map<const Vector>(ranges.data(), 5);
}

double beam_bearing(const SonarConfig& sonar, double heading, std::size_t beam)
{
    return wrap_degrees(heading + sonar.side * (sonar.beam_angles.at(beam) - sonar.datum));
}

double ray_range(const TankGeometry& tank, double x, double y, double bearing)
{
    const double dx = std::cos(bearing * deg2rad);
    const double dy = std::sin(bearing * deg2rad);
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double tx = dx > 0.0 ? (tank.width - x) / dx : dx < 0.0 ? -x / dx : inf;
    const double ty = dy > 0.0 ? (tank.length - y) / dy : dy < 0.0 ? -y / dy : inf;
    return std::min(tx, ty);
}

std::array<double, 5> exact_ranges(const VehicleState& state, const TankGeometry& tank, const SonarConfig& sonar)
{
    check_inside(state, tank);
    std::array<double, 5> r{};
    for (std::size_t b = 0; b < 5; ++b)
        r[b] = ray_range(tank, state.x, state.y, beam_bearing(sonar, state.heading, b));
    return r;
}

ContourClass contour_label(const VehicleState& state, const TankGeometry& tank, const SonarConfig& sonar)
{
    const auto r = exact_ranges(state, tank, sonar);
    std::array<Eigen::Vector2d, 5> hits;
    std::array<int, 5> hit_wall{};
    for (std::size_t b = 0; b < 5; ++b) {
        const double brg = beam_bearing(sonar, state.heading, b) * deg2rad;
        hits[b] = Eigen::Vector2d(state.x + r[b] * std::cos(brg), state.y + r[b] * std::sin(brg));
        hit_wall[b] = nearest_wall(tank, hits[b]);
    }
    // Corner k joins walls k and k % 4 + 1 (corner 0 joins walls 4 and 1).
    const auto corners = tank.corners();
    for (std::size_t k = 0; k < 4; ++k) {
        const int wa = k == 0 ? 4 : static_cast<int>(k);
        const int wb = static_cast<int>(k) + 1;
        bool on_a = false;
        bool on_b = false;
        for (int w : hit_wall) {
            on_a = on_a || w == wa;
            on_b = on_b || w == wb;
        }
        if (!(on_a && on_b))
            continue;
        for (std::size_t b = 0; b + 1 < 5; ++b)
            if (point_segment_distance(corners[k], hits[b], hits[b + 1]) <= tank.corner_radius)
                return ContourClass::corner;
    }
    return ContourClass::wall;
}

SonarScan simulate_sonar(const VehicleState& state, const TankGeometry& tank, const SonarConfig& sonar, double sigma,
                         Rng& rng)
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw ValidationError("simulate_sonar: noise sigma must be non-negative");
    SonarScan scan;
    scan.ranges = exact_ranges(state, tank, sonar);
    scan.t = state.t;
    scan.truth = contour_label(state, tank, sonar);
    if (sigma > 0.0) {
        const double cap = tank.diagonal();
        for (double& r : scan.ranges)
            r = std::clamp(r + rng.normal(0.0, sigma), 1e-3, cap);
    }
    return scan;
}

double min_range_offset(const std::array<double, 5>& ranges, const SonarConfig& sonar)
{
    const auto it = std::min_element(ranges.begin(), ranges.end());
    const auto b = static_cast<std::size_t>(it - ranges.begin());
    return sonar.side * (sonar.beam_angles[b] - (sonar.datum + 90.0));
}

void DatasetSpec::validate(const TankGeometry& tank, const VehicleLimits& limits) const
{
    if (wall == 0 || corner == 0)
        throw ValidationError("dataset class counts must both be positive");
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw ValidationError("dataset noise sigma must be non-negative");
    const double span = std::min(tank.width, tank.length);
    if (!(offset_min >= limits.hull_radius) || !(offset_min <= offset_max) ||
        !(offset_max <= span - limits.hull_radius))
        throw ValidationError("dataset wall offsets must fit inside the tank");
    if (!(heading_jitter >= 0.0) || !(heading_jitter < 45.0))
        throw ValidationError("dataset heading jitter must lie in [0, 45)");
    if (!(turn_fraction >= 0.0) || !(turn_fraction <= 1.0))
        throw ValidationError("dataset turn fraction must lie in [0, 1]");
}

GeneratedDataset generate_dataset(const TankGeometry& tank, const SonarConfig& sonar_in, const DatasetSpec& spec,
                                  const VehicleLimits& limits)
{
    tank.validate();
    limits.validate();
    spec.validate(tank, limits);
    SonarConfig sonar = sonar_in;
    sonar.side = wall_side(spec.direction);
    sonar.validate();

    Rng pose_rng(spec.seed, "dataset-poses");
    Rng noise_rng(spec.seed, "dataset-noise");
    const int turn_sign = -wall_side(spec.direction);

    std::vector<VehicleState> poses;
    std::vector<SonarScan> scans;
    std::size_t have[2] = {0, 0};
    const std::size_t want[2] = {spec.wall, spec.corner};
    for (std::size_t draw = 0; have[0] < want[0] || have[1] < want[1]; ++draw) {
        if (draw >= spec.max_draws)
            throw ValidationError("generate_dataset: class counts unreachable within the draw budget");
        const int w = 1 + static_cast<int>(pose_rng.below(4));
        const double d = pose_rng.uniform(spec.offset_min, spec.offset_max);
        const double along_len = (w == 1 || w == 3) ? tank.width : tank.length;
        const double s = pose_rng.uniform(limits.hull_radius, along_len - limits.hull_radius);
        double heading = wall_heading(w, spec.direction) + pose_rng.uniform(-spec.heading_jitter, spec.heading_jitter);
        if (pose_rng.uniform() < spec.turn_fraction)
            heading += turn_sign * pose_rng.uniform(0.0, 90.0);
        const double depth = pose_rng.uniform(0.0, tank.depth);

        VehicleState st;
        switch (w) {
        case 1:
            st.x = s, st.y = d;
            break;
        case 2:
            st.x = tank.width - d, st.y = s;
            break;
        case 3:
            st.x = s, st.y = tank.length - d;
            break;
        default:
            st.x = d, st.y = s;
            break;
        }
        st.heading = wrap_degrees(heading);
        st.depth = depth;

        const int label = static_cast<int>(contour_label(st, tank, sonar));
        if (have[label] >= want[label])
            continue;
        ++have[label];
        scans.push_back(simulate_sonar(st, tank, sonar, spec.sigma, noise_rng));
        poses.push_back(st);
    }

    GeneratedDataset out;
    const auto n = static_cast<Eigen::Index>(scans.size());
    out.data.X.resize(n, 5);
    out.data.T.resize(n);
    for (Eigen::Index p = 0; p < n; ++p) {
        const auto& sc = scans[static_cast<std::size_t>(p)];
        out.data.X.row(p) = sc.features().transpose();
        out.data.T(p) = sc.truth == ContourClass::corner ? 1.0 : 0.0;
    }
    out.data.feature_names = sonar_feature_names;
    out.poses = std::move(poses);
    return out;
}

} // namespace fit2
