#pragma once

#include "fit2/controllers.hpp"
#include "fit2/felm_training.hpp"
#include "fit2/navigation.hpp"
#include "fit2/simulator.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

namespace fit2
{

struct ControllerSet
{
    FPDConfig heading = FPDConfig::heading_default();
    FPDConfig depth = FPDConfig::depth_default();
    FPDConfig edge = FPDConfig::edge_default();

    void validate() const;
};

struct MissionConfig
{
    std::size_t circuits = 2;
    std::vector<double> depth_setpoints = {0.0, 2.0};
    double edge_distance = 0.65;
    std::map<int, double> edge_overrides = {{4, 1.5}};
    Direction direction = Direction::clockwise;
    double sigma_sonar = 0.02;
    double sigma_compass = 0.2;
    double sigma_depth = 0.002;
    double dt = 0.1;
    std::uint64_t seed = 1;

    TankGeometry tank;
    VehicleLimits vehicle;
    SonarConfig sonar;
    CoordinationThresholds thresholds;
    ControllerSet controllers;

    std::size_t smoothing_window = 4;
    std::size_t edge_beam = 0;      // index of the d_c beam
    double max_edge_offset = 30.0;  // deg of heading offset at full edge output
    double approach_offset = 30.0;  // deg, fixed offset while outside the capture band
    double edge_capture_band = 0.08;
    double edge_release_band = 0.25;
    double turn_rate = 10.0;        // deg/s, heading reference rate limit
    double depth_rate = 0.1;        // m/s, depth reference rate limit
    double cruise_surge = 1.0;
    double acquire_band = 0.05;     // m, see MissionSummary::mean_abs_edge_error
    std::size_t depth_settle_steps = 10;
    double max_time = 3600.0;       // s of simulated time

    void validate() const;
    double edge_target(int wall) const;
};

enum class MissionPhase : int
{
    follow = 0,
    turn = 1,
    depth_change = 2,
    done = 3
};

std::string to_string(MissionPhase p);

struct StepRecord
{
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double depth = 0.0;
    double heading = 0.0;
    std::array<double, 5> ranges{};
    double raw_score = 0.0;
    double smoothed_score = 0.0;
    int predicted = 0; // smoothed class
    int truth = 0;
    BehaviorSet behaviors;
    double u_yaw = 0.0;
    double u_surge = 0.0;
    double u_heave = 0.0;
    MissionPhase phase = MissionPhase::follow;
    int wall = 0;
    double edge_target = 0.0;
    double wall_distance = 0.0; // true perpendicular distance to the followed wall
    bool acquired = false;
    bool collided = false;
};

struct MissionSummary
{
    bool completed = false;
    bool timed_out = false;
    std::vector<std::size_t> circuits_per_depth;
    std::size_t collisions = 0;
    /// Mean |wall distance - d_w| over follow steps once the leg has first come
    /// within acquire_band of its target.
    double mean_abs_edge_error = 0.0;
    std::size_t edge_samples = 0;
    /// Same, over every follow step including the approach to the target.
    double mean_abs_edge_error_all = 0.0;
    ConfusionMatrix classification;
    double classification_accuracy = 0.0;
    std::size_t steps = 0;
    double sim_time = 0.0;
};

struct MissionLog
{
    std::vector<StepRecord> records;
    MissionSummary summary;
};

/// Recomputes the record-derived metrics of a summary.
MissionSummary summarize(const std::vector<StepRecord>& records);

/// Scores a scan; the ground-truth oracle returns the true label as 0/1.
using ContourScorer = std::function<double(const SonarScan&)>;

MissionLog run_mission(const MissionConfig& cfg, const ContourScorer& scorer);
MissionLog run_mission(const MissionConfig& cfg, const Classifier& model);
MissionLog run_mission_ground_truth(const MissionConfig& cfg);

// Config and log files.
inline constexpr const char* mission_format_name = "fit2felm-mission";
inline constexpr int mission_format_major = 1;

nlohmann::json mission_config_to_json(const MissionConfig& cfg);
/// Keys absent from `j` keep their values in `base`.
MissionConfig mission_config_from_json(const nlohmann::json& j, MissionConfig base = {});
nlohmann::json fpd_config_to_json(const FPDConfig& c);
FPDConfig fpd_config_from_json(const nlohmann::json& j, FPDConfig base);

void write_mission_csv(std::ostream& out, const std::vector<StepRecord>& records);
nlohmann::json mission_summary_to_json(const MissionSummary& s);

} // namespace fit2
