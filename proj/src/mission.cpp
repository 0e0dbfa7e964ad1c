#include "fit2/mission.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fit2
{

void ControllerSet::validate() const
{
    heading.validate();
    depth.validate();
    edge.validate();
}

void MissionConfig::validate() const
{
    tank.validate();
    vehicle.validate();
    sonar.validate();
    thresholds.validate();
    controllers.validate();
    if (circuits == 0)
        throw ValidationError("mission needs at least one circuit");
    if (depth_setpoints.empty())
        throw ValidationError("mission needs at least one depth setpoint");
    for (double d : depth_setpoints)
        if (!(d >= 0.0) || !(d <= tank.depth))
            throw ValidationError("depth setpoint " + std::to_string(d) + " lies outside the tank");
    const double span = std::min(tank.width, tank.length);
    if (!(edge_distance > vehicle.hull_radius) || !(edge_distance < span / 2.0))
        throw ValidationError("edge distance must exceed the hull radius and stay below half the tank width");
    for (const auto& [wall, d] : edge_overrides) {
        if (wall < 1 || wall > 4)
            throw ValidationError("edge override for unknown wall " + std::to_string(wall));
        if (!(d > vehicle.hull_radius) || !(d < span - vehicle.hull_radius))
            throw ValidationError("edge override for wall " + std::to_string(wall) + " does not fit in the tank");
    }
    for (double s : {sigma_sonar, sigma_compass, sigma_depth})
        if (!(s >= 0.0) || !std::isfinite(s))
            throw ValidationError("noise levels must be non-negative");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ValidationError("dt must be positive");
    if (smoothing_window == 0)
        throw ValidationError("smoothing window must hold at least one score");
    if (edge_beam >= 5)
        throw ValidationError("edge beam index must be 0..4");
    if (!(max_edge_offset > 0.0) || !(max_edge_offset < 90.0))
        throw ValidationError("max edge offset must lie in (0, 90) degrees");
    if (!(turn_rate > 0.0) || !(depth_rate > 0.0))
        throw ValidationError("reference rate limits must be positive");
    if (!(cruise_surge > 0.0) || !(cruise_surge <= 1.0))
        throw ValidationError("cruise surge must lie in (0, 1]");
    if (!(edge_capture_band > 0.0) || !(edge_release_band > edge_capture_band))
        throw ValidationError("edge bands need 0 < capture < release");
    if (!(approach_offset > 0.0) || !(approach_offset < 90.0))
        throw ValidationError("approach offset must lie in (0, 90) degrees");
    if (!(acquire_band > 0.0))
        throw ValidationError("acquire band must be positive");
    if (!(max_time > 0.0) || !std::isfinite(max_time))
        throw ValidationError("max time must be positive");
}

double MissionConfig::edge_target(int wall) const
{
    const auto it = edge_overrides.find(wall);
    return it == edge_overrides.end() ? edge_distance : it->second;
}

std::string to_string(MissionPhase p)
{
    switch (p) {
    case MissionPhase::follow:
        return "follow";
    case MissionPhase::turn:
        return "turn";
    case MissionPhase::depth_change:
        return "depth-change";
    case MissionPhase::done:
        return "done";
    }
    return "unknown";
}

MissionSummary summarize(const std::vector<StepRecord>& records)
{
    MissionSummary s;
    double sum_acq = 0.0;
    double sum_all = 0.0;
    std::size_t n_all = 0;
    std::vector<int> pred;
    std::vector<int> truth;
    pred.reserve(records.size());
    truth.reserve(records.size());
    for (const auto& r : records) {
        if (r.collided)
            ++s.collisions;
        if (r.phase == MissionPhase::follow) {
            const double err = std::abs(r.wall_distance - r.edge_target);
            sum_all += err;
            ++n_all;
            if (r.acquired) {
                sum_acq += err;
                ++s.edge_samples;
            }
        }
        pred.push_back(r.predicted);
        truth.push_back(r.truth);
    }
    s.mean_abs_edge_error = s.edge_samples ? sum_acq / static_cast<double>(s.edge_samples) : 0.0;
    s.mean_abs_edge_error_all = n_all ? sum_all / static_cast<double>(n_all) : 0.0;
    s.classification = confusion_matrix(pred, truth);
    s.classification_accuracy = s.classification.accuracy();
    s.steps = records.size();
    s.sim_time = records.empty() ? 0.0 : records.back().t;
    return s;
}

namespace
{

double snap_quarter(double heading)
{
    return wrap_degrees(90.0 * std::round(heading / 90.0));
}

double noise(Rng& rng, double sigma)
{
    return sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0;
}

double rate_limit(double from, double to, double max_step)
{
    return from + std::clamp(to - from, -max_step, max_step);
}

VehicleState start_pose(const MissionConfig& cfg, Rng& rng)
{
    const int wall = 1 + static_cast<int>(rng.below(4));
    const double heading = wall_heading(wall, cfg.direction);
    const double h = heading * std::numbers::pi / 180.0;
    const Eigen::Vector2d along(std::cos(h), std::sin(h));
    // The followed wall lies at heading + side*90 deg.
    const double side = wall_side(cfg.direction);
    const Eigen::Vector2d to_wall(-side * along.y(), side * along.x());

    const double half_across = (wall == 1 || wall == 3) ? cfg.tank.length / 2.0 : cfg.tank.width / 2.0;
    const double leg_len = (wall == 1 || wall == 3) ? cfg.tank.width : cfg.tank.length;
    const double offset = rng.uniform(0.5, 0.9);
    const double s = rng.uniform(0.35, 0.5) * leg_len;

    const Eigen::Vector2d c(cfg.tank.width / 2.0, cfg.tank.length / 2.0);
    const Eigen::Vector2d p = c + (half_across - offset) * to_wall + (s - leg_len / 2.0) * along;

    VehicleState st;
    st.x = p.x();
    st.y = p.y();
    st.heading = wrap_degrees(heading + rng.uniform(-15.0, 15.0));
    st.depth = std::clamp(cfg.depth_setpoints.front() + rng.uniform(-0.2, 0.2), 0.0, cfg.tank.depth);
    return st;
}

} // namespace

MissionLog run_mission(const MissionConfig& cfg, const ContourScorer& scorer)
{
    cfg.validate();
    SonarConfig sonar = cfg.sonar;
    sonar.side = wall_side(cfg.direction);
    const int turn_sign = -sonar.side;
    const auto& th = cfg.thresholds;

    Rng pose_rng(cfg.seed, "start-pose");
    Rng sonar_rng(cfg.seed, "sonar-noise");
    Rng nav_rng(cfg.seed, "nav-noise");

    VehicleState st = start_pose(cfg, pose_rng);
    ClassScoreWindow window(cfg.smoothing_window);

    MissionPhase phase = MissionPhase::follow;
    double leg = 0.0;
    int wall = 0;
    std::size_t turns = 0;
    std::size_t depth_idx = 0;
    std::vector<std::size_t> circuits(cfg.depth_setpoints.size(), 0);

    double heading_ref = 0.0;
    double depth_ref = st.depth;
    double offset = 0.0;
    bool acquired = false;
    std::size_t streak = 0;
    std::size_t clear_steps = 0;
    std::size_t settle_steps = 0;

    FPDState hs, ds, es;
    bool h_on = false, d_on = false, e_on = false;
    bool tracking = false;

    MissionLog log;
    const auto max_steps = static_cast<std::size_t>(std::ceil(cfg.max_time / cfg.dt));
    log.records.reserve(std::min<std::size_t>(max_steps, 200000));

    for (std::size_t k = 0; k < max_steps && phase != MissionPhase::done; ++k) {
        const SonarScan scan = simulate_sonar(st, cfg.tank, sonar, cfg.sigma_sonar, sonar_rng);
        double raw;
        try {
            raw = scorer(scan);
        } catch (const NoRuleFiresError&) {
            raw = window.mean();
        }
        if (!std::isfinite(raw))
            raw = window.mean();
        const double smoothed = window.push(raw);

        const double heading_m = wrap_degrees(st.heading + noise(nav_rng, cfg.sigma_compass));
        const double depth_m = st.depth + noise(nav_rng, cfg.sigma_depth);

        if (k == 0) {
            leg = snap_quarter(heading_reference(heading_m, min_range_offset(scan.ranges, sonar)));
            wall = wall_for_heading(leg, cfg.direction);
            heading_ref = heading_m;
        }

        const double depth_goal = cfg.depth_setpoints[depth_idx];
        CoordinationSnapshot snap;
        snap.heading_error = angle_difference(wrap_degrees(leg + offset), heading_m);
        snap.depth_error = depth_goal - depth_m;
        snap.smoothed_class = smoothed;
        const BehaviorSet table_set = coordinate_behaviors(snap, th, streak);

        // Maneuver state machine.
        if (phase == MissionPhase::follow && table_set.corner_turn) {
            leg = wrap_degrees(leg + turn_sign * 90.0);
            phase = MissionPhase::turn;
            clear_steps = 0;
            offset = 0.0;
        } else if (phase == MissionPhase::turn) {
            clear_steps = smoothed < th.class_threshold ? clear_steps + 1 : 0;
            if (clear_steps >= th.corner_steps && std::abs(angle_difference(leg, heading_m)) < th.heading_deg) {
                phase = MissionPhase::follow;
                wall = next_wall(wall, cfg.direction);
                acquired = false;
                if (++turns % 4 == 0 && ++circuits[depth_idx] >= cfg.circuits) {
                    if (depth_idx + 1 < cfg.depth_setpoints.size()) {
                        ++depth_idx;
                        phase = MissionPhase::depth_change;
                        settle_steps = 0;
                    } else {
                        phase = MissionPhase::done;
                    }
                }
            }
        } else if (phase == MissionPhase::depth_change) {
            settle_steps = std::abs(depth_goal - depth_m) < th.depth_m ? settle_steps + 1 : 0;
            if (settle_steps >= cfg.depth_settle_steps)
                phase = MissionPhase::follow;
        }

        BehaviorSet active = table_set;
        if (phase == MissionPhase::turn) {
            active.corner_turn = true;
            active.heading = true;
            active.edge = false;
        } else {
            active.corner_turn = false;
            if (phase != MissionPhase::follow)
                active.edge = false;
            if (phase == MissionPhase::depth_change)
                active.depth = true;
        }

        const double d_w = cfg.edge_target(wall);
        Commands cmd;
        if (active.edge) {
            const double e = d_w - scan.ranges[cfg.edge_beam];
            // Far from the target the behavior approaches on a fixed offset;
            // inside the capture band the fuzzy PD regulates from a fresh state.
            if (!e_on)
                tracking = false;
            if (tracking && std::abs(e) > cfg.edge_release_band)
                tracking = false;
            else if (!tracking && std::abs(e) < cfg.edge_capture_band) {
                tracking = true;
                es = {};
            }
            if (tracking) {
                const auto r = controller_step_error(cfg.controllers.edge, es, e);
                es = r.state;
                offset = -sonar.side * r.u * cfg.max_edge_offset;
            } else {
                offset = -sonar.side * (e > 0.0 ? 1.0 : -1.0) * cfg.approach_offset;
            }
        } else {
            offset = 0.0;
        }
        e_on = active.edge;

        const double goal = wrap_degrees(leg + offset);
        heading_ref = wrap_degrees(heading_ref + std::clamp(angle_difference(goal, heading_ref),
                                                            -cfg.turn_rate * cfg.dt, cfg.turn_rate * cfg.dt));
        depth_ref = rate_limit(depth_ref, cfg.depth_setpoints[depth_idx], cfg.depth_rate * cfg.dt);

        if (active.heading) {
            if (!h_on)
                hs = {};
            const auto r = controller_step_error(cfg.controllers.heading, hs, angle_difference(heading_ref, heading_m));
            hs = r.state;
            cmd.yaw = r.u;
        }
        h_on = active.heading;

        if (active.depth) {
            if (!d_on)
                ds = {};
            const auto r = controller_step_error(cfg.controllers.depth, ds, depth_ref - depth_m);
            ds = r.state;
            cmd.heave = r.u;
        }
        d_on = active.depth;

        cmd.surge = phase == MissionPhase::follow ? cfg.cruise_surge : 0.0;

        StepRecord rec;
        rec.t = st.t;
        rec.x = st.x;
        rec.y = st.y;
        rec.depth = st.depth;
        rec.heading = st.heading;
        rec.ranges = scan.ranges;
        rec.raw_score = raw;
        rec.smoothed_score = smoothed;
        rec.predicted = static_cast<int>(classify_score(smoothed, th.class_threshold));
        rec.truth = static_cast<int>(scan.truth);
        rec.behaviors = active;
        rec.u_yaw = cmd.yaw;
        rec.u_surge = cmd.surge;
        rec.u_heave = cmd.heave;
        rec.phase = phase;
        rec.wall = wall;
        rec.edge_target = d_w;
        rec.wall_distance = cfg.tank.wall_distance(wall, st.x, st.y);
        if (phase == MissionPhase::follow && std::abs(rec.wall_distance - d_w) <= cfg.acquire_band)
            acquired = true;
        rec.acquired = acquired && phase == MissionPhase::follow;

        if (phase != MissionPhase::done) {
            st = step_vehicle(st, cmd, cfg.dt, cfg.vehicle, cfg.tank);
            rec.collided = st.collided;
        }
        log.records.push_back(rec);
    }

    log.summary = summarize(log.records);
    log.summary.completed = phase == MissionPhase::done;
    log.summary.timed_out = !log.summary.completed;
    log.summary.circuits_per_depth = circuits;
    return log;
}

MissionLog run_mission(const MissionConfig& cfg, const Classifier& model)
{
    if (input_count(model) != 5)
        throw ValidationError("mission model must take the 5 sonar ranges as inputs");
    return run_mission(cfg, [&](const SonarScan& scan) { return predict(model, scan.features()); });
}

MissionLog run_mission_ground_truth(const MissionConfig& cfg)
{
    return run_mission(cfg,
                       [](const SonarScan& scan) { return scan.truth == ContourClass::corner ? 1.0 : 0.0; });
}

} // namespace fit2
