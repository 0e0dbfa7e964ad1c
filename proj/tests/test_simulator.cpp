#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fit2/io.hpp"
#include "fit2/mission.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

using namespace fit2;
using nlohmann::json;

namespace
{

// Ray against the four wall segments; smallest positive parameter wins.
double oracle_range(double w, double l, double x, double y, double bearing_deg)
{
    const double a = bearing_deg * std::numbers::pi / 180.0;
    const double dx = std::cos(a);
    const double dy = std::sin(a);
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](double t, double hx, double hy) {
        if (t > 0.0 && hx >= -1e-12 && hx <= w + 1e-12 && hy >= -1e-12 && hy <= l + 1e-12)
            best = std::min(best, t);
    };
    if (dy != 0.0) {
        const double t0 = -y / dy;
        consider(t0, x + t0 * dx, 0.0);
        const double t1 = (l - y) / dy;
        consider(t1, x + t1 * dx, l);
    }
    if (dx != 0.0) {
        const double t0 = -x / dx;
        consider(t0, 0.0, y + t0 * dy);
        const double t1 = (w - x) / dx;
        consider(t1, w, y + t1 * dy);
    }
    return best;
}

VehicleState pose(double x, double y, double heading, double depth = 1.0)
{
    VehicleState s;
    s.x = x;
    s.y = y;
    s.heading = heading;
    s.depth = depth;
    return s;
}

MissionConfig quiet_config()
{
    MissionConfig c;
    c.sigma_sonar = 0.0;
    c.sigma_compass = 0.0;
    c.sigma_depth = 0.0;
    return c;
}

bool same_records(const std::vector<StepRecord>& a, const std::vector<StepRecord>& b)
{
    std::ostringstream sa, sb;
    write_mission_csv(sa, a);
    write_mission_csv(sb, b);
    return sa.str() == sb.str();
}

} // namespace

TEST_CASE("tank geometry")
{
    const TankGeometry t;
    CHECK(t.diagonal() == doctest::Approx(2.5 * std::sqrt(2.0)));
    CHECK(t.wall_distance(1, 1.0, 0.3) == 0.3);
    CHECK(t.wall_distance(2, 2.0, 0.3) == doctest::Approx(0.5));
    CHECK(t.wall_distance(3, 1.0, 2.0) == doctest::Approx(0.5));
    CHECK(t.wall_distance(4, 0.7, 2.0) == 0.7);
    CHECK_THROWS_AS(t.wall_distance(5, 1.0, 1.0), ValidationError);
    const auto c = t.corners();
    CHECK(c[2].x() == 2.5);
    CHECK(c[2].y() == 2.5);
    TankGeometry bad;
    bad.width = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("wall order and travel headings")
{
    CHECK(next_wall(1, Direction::anticlockwise) == 2);
    CHECK(next_wall(4, Direction::anticlockwise) == 1);
    CHECK(next_wall(1, Direction::clockwise) == 4);
    CHECK(next_wall(4, Direction::clockwise) == 3);
    CHECK(wall_heading(1, Direction::anticlockwise) == 0.0);
    CHECK(wall_heading(2, Direction::anticlockwise) == 90.0);
    CHECK(wall_heading(1, Direction::clockwise) == 180.0);
    CHECK(wall_for_heading(95.0, Direction::anticlockwise) == 2);
    CHECK(wall_for_heading(265.0, Direction::clockwise) == 2);
    CHECK(wall_side(Direction::clockwise) == 1);
    CHECK(wall_side(Direction::anticlockwise) == -1);
    CHECK(direction_from_string(to_string(Direction::clockwise)) == Direction::clockwise);
    CHECK_THROWS_AS(direction_from_string("sideways"), ValidationError);
}

TEST_CASE("zero commands from rest change only time")
{
    const VehicleState s = pose(1.0, 1.2, 45.0);
    const auto n = step_vehicle(s, {}, 0.1, {}, {});
    CHECK(n.x == s.x);
    CHECK(n.y == s.y);
    CHECK(n.heading == s.heading);
    CHECK(n.depth == s.depth);
    CHECK(n.speed == 0.0);
    CHECK(n.t == doctest::Approx(0.1));
    CHECK_FALSE(n.collided);
}

TEST_CASE("full surge converges to max speed without overshoot")
{
    const VehicleLimits lim;
    TankGeometry big;
    big.width = big.length = 100.0;
    VehicleState s = pose(1.0, 50.0, 0.0);
    double prev = 0.0;
    for (int k = 0; k < 200; ++k) {
        s = step_vehicle(s, {0.0, 1.0, 0.0}, 0.1, lim, big);
        REQUIRE(s.speed >= prev);
        REQUIRE(s.speed <= lim.max_speed);
        prev = s.speed;
    }
    CHECK(s.speed == doctest::Approx(lim.max_speed).epsilon(1e-12));
    CHECK(s.y == 50.0);
}

TEST_CASE("heave is decoupled from the plane")
{
    VehicleState s = pose(1.25, 1.25, 30.0, 1.0);
    for (int k = 0; k < 50; ++k)
        s = step_vehicle(s, {0.0, 0.0, 1.0}, 0.1, {}, {});
    CHECK(s.x == 1.25);
    CHECK(s.y == 1.25);
    CHECK(s.heading == 30.0);
    CHECK(s.depth > 1.0);
}

TEST_CASE("vehicle stays inside the tank and flags contact")
{
    const TankGeometry tank;
    const VehicleLimits lim;
    VehicleState s = pose(1.25, 1.25, 0.0, 3.4);
    bool hit = false;
    for (int k = 0; k < 3000; ++k) {
        s = step_vehicle(s, {0.1, 1.0, 1.0}, 0.1, lim, tank);
        REQUIRE(s.x >= 0.0);
        REQUIRE(s.x <= tank.width);
        REQUIRE(s.y >= 0.0);
        REQUIRE(s.y <= tank.length);
        REQUIRE(s.depth >= 0.0);
        REQUIRE(s.depth <= tank.depth);
        hit = hit || s.collided;
    }
    CHECK(hit);
}

TEST_CASE("commands outside [-1, 1] are rejected")
{
    const VehicleState s;
    CHECK_THROWS_AS(step_vehicle(s, {1.5, 0, 0}, 0.1, {}, {}), ValidationError);
    CHECK_THROWS_AS(step_vehicle(s, {0, -1.01, 0}, 0.1, {}, {}), ValidationError);
    CHECK_THROWS_AS(step_vehicle(s, {0, 0, std::nan("")}, 0.1, {}, {}), ValidationError);
    CHECK_THROWS_AS(step_vehicle(s, {}, 0.0, {}, {}), ValidationError);
}

TEST_CASE("noise-free ranges match a ray-segment oracle")
{
    const TankGeometry tank;
    for (int side : {1, -1}) {
        SonarConfig sonar;
        sonar.side = side;
        for (double x = 0.05; x < tank.width; x += 0.2)
            for (double y = 0.05; y < tank.length; y += 0.2)
                for (double h = 0.0; h < 360.0; h += 7.5) {
                    const auto s = pose(x, y, h);
                    const auto r = exact_ranges(s, tank, sonar);
                    for (std::size_t b = 0; b < 5; ++b) {
                        const double brg = h + side * (sonar.beam_angles[b] - sonar.datum);
                        REQUIRE(std::abs(r[b] - oracle_range(tank.width, tank.length, x, y, brg)) <= 1e-9);
                        REQUIRE(r[b] > 0.0);
                        REQUIRE(r[b] <= tank.diagonal() + 1e-12);
                    }
                }
    }
}

TEST_CASE("centred vehicle facing a wall squarely")
{
    const TankGeometry tank;
    const SonarConfig sonar;
    // Port side: the 180 beam points at heading + 90.
    const auto r = exact_ranges(pose(1.25, 1.25, 0.0), tank, sonar);
    CHECK(r[0] == doctest::Approx(1.25).epsilon(1e-12));
    // Off-normal beams reach the same wall at 1.25 / cos(offset).
    for (std::size_t b = 1; b < 5; ++b) {
        const double off = (180.0 - sonar.beam_angles[b]) * std::numbers::pi / 180.0;
        CHECK(r[b] == doctest::Approx(1.25 / std::cos(off)).epsilon(1e-12));
    }
    CHECK(contour_label(pose(1.25, 1.25, 0.0), tank, sonar) == ContourClass::wall);
}

TEST_CASE("labels: mid-wall is wall, near a visible corner is corner")
{
    const TankGeometry tank;
    const SonarConfig sonar; // port side, clockwise travel
    // Clockwise along wall 1 (heading 180) with the wall on port: mid-wall.
    CHECK(contour_label(pose(1.25, 0.65, 180.0), tank, sonar) == ContourClass::wall);
    // Same track close to the corner at the origin: the fan reaches wall 4 too.
    CHECK(contour_label(pose(0.3, 0.65, 180.0), tank, sonar) == ContourClass::corner);
    // At x = 0.7 the fan still lands on wall 1 only.
    CHECK(contour_label(pose(0.7, 0.65, 180.0), tank, sonar) == ContourClass::wall);
    // The origin corner is behind the vehicle when heading away from it.
    CHECK(contour_label(pose(0.7, 0.65, 0.0), tank, SonarConfig{default_beam_angles, 90.0, -1}) ==
          ContourClass::wall);
}

TEST_CASE("sonar is deterministic and noise is clamped")
{
    const TankGeometry tank;
    const SonarConfig sonar;
    const auto s = pose(0.4, 0.8, 200.0);
    Rng a(3, "sonar");
    Rng b(3, "sonar");
    const auto sa = simulate_sonar(s, tank, sonar, 0.02, a);
    const auto sb = simulate_sonar(s, tank, sonar, 0.02, b);
    CHECK(sa.ranges == sb.ranges);
    CHECK(sa.truth == sb.truth);
    Rng c(4);
    for (int i = 0; i < 1000; ++i) {
        const auto sc = simulate_sonar(s, tank, sonar, 5.0, c);
        for (double r : sc.ranges) {
            REQUIRE(r > 0.0);
            REQUIRE(r <= tank.diagonal());
        }
    }
    Rng z(5);
    CHECK(simulate_sonar(s, tank, sonar, 0.0, z).ranges == exact_ranges(s, tank, sonar));
    CHECK_THROWS_AS(simulate_sonar(s, tank, sonar, -1.0, z), ValidationError);
}

TEST_CASE("sonar outside the tank is an error")
{
    const TankGeometry tank;
    const SonarConfig sonar;
    Rng rng(1);
    CHECK_THROWS_AS(simulate_sonar(pose(-0.1, 1.0, 0.0), tank, sonar, 0.0, rng), ValidationError);
    CHECK_THROWS_AS(simulate_sonar(pose(1.0, 2.6, 0.0), tank, sonar, 0.0, rng), ValidationError);
    CHECK_THROWS_AS(simulate_sonar(pose(1.0, 1.0, 0.0, 4.0), tank, sonar, 0.0, rng), ValidationError);
}

TEST_CASE("minimum-range offset")
{
    const SonarConfig sonar;
    CHECK(min_range_offset({0.5, 0.6, 0.7, 0.8, 0.9}, sonar) == 0.0);
    CHECK(min_range_offset({0.9, 0.8, 0.7, 0.6, 0.5}, sonar) == -32.0);
    SonarConfig stbd = sonar;
    stbd.side = -1;
    CHECK(min_range_offset({0.9, 0.8, 0.7, 0.6, 0.5}, stbd) == 32.0);
}

TEST_CASE("behavior table is total and follows its predicates")
{
    for (int bits = 0; bits < 8; ++bits) {
        const Predicates p{(bits & 4) != 0, (bits & 2) != 0, (bits & 1) != 0};
        const auto b = behavior_table(p);
        REQUIRE_FALSE(b.empty());
        REQUIRE(b.depth == p.depth);
        REQUIRE(b.corner_turn == p.corner);
        REQUIRE(b.edge == !p.corner);
        REQUIRE(b.heading == (p.heading && !p.corner));
    }
    CHECK(behavior_table({false, false, false}).names() == "edge");
    CHECK(behavior_table({true, true, false}).names() == "heading+depth+edge");
    CHECK(behavior_table({true, false, true}).names() == "corner-turn");
    CHECK(BehaviorSet{}.names() == "none");
    CHECK(behavior_table({true, true, true}).mask() == 2 + 8);
}

TEST_CASE("corner predicate needs a sustained streak")
{
    CoordinationThresholds th;
    std::size_t streak = 0;
    Predicates p;
    CoordinationSnapshot snap{0.0, 0.0, 0.7};
    CHECK_FALSE(coordinate_behaviors(snap, th, streak, &p).corner_turn);
    CHECK_FALSE(coordinate_behaviors(snap, th, streak, &p).corner_turn);
    CHECK(coordinate_behaviors(snap, th, streak, &p).corner_turn);
    CHECK(streak == 3);
    snap.smoothed_class = 0.2;
    CHECK(coordinate_behaviors(snap, th, streak, &p).edge);
    CHECK(streak == 0);
    snap = {6.0, -0.06, 0.0};
    const auto b = coordinate_behaviors(snap, th, streak, &p);
    CHECK(p.heading);
    CHECK(p.depth);
    CHECK(b == BehaviorSet{true, true, true, false});
    snap.heading_error = std::nan("");
    CHECK_THROWS_AS(coordinate_behaviors(snap, th, streak), ValidationError);
}

TEST_CASE("generated dataset has exact counts and consistent labels")
{
    const TankGeometry tank;
    const SonarConfig sonar;
    DatasetSpec spec;
    spec.wall = 60;
    spec.corner = 40;
    const auto g = generate_dataset(tank, sonar, spec);
    REQUIRE(g.data.samples() == 100);
    REQUIRE(g.data.features() == 5);
    CHECK(g.data.T.sum() == 40.0);
    SonarConfig used = sonar;
    used.side = wall_side(spec.direction);
    for (std::size_t p = 0; p < g.poses.size(); ++p) {
        const auto label = contour_label(g.poses[p], tank, used);
        REQUIRE(static_cast<double>(label) == g.data.T(static_cast<Eigen::Index>(p)));
    }
    const auto again = generate_dataset(tank, sonar, spec);
    CHECK(again.data.X == g.data.X);
    spec.seed = 2;
    CHECK_FALSE(generate_dataset(tank, sonar, spec).data.X == g.data.X);
}

TEST_CASE("default dataset is 788 rows")
{
    const auto g = generate_dataset({}, {}, {});
    CHECK(g.data.samples() == 788);
    CHECK(g.data.T.sum() == 388.0);
    CHECK(g.data.feature_names == sonar_feature_names);
}

TEST_CASE("noise-free dataset rows equal the exact ranges at their poses")
{
    DatasetSpec spec;
    spec.wall = 30;
    spec.corner = 30;
    spec.sigma = 0.0;
    spec.direction = Direction::anticlockwise;
    const TankGeometry tank;
    SonarConfig sonar;
    const auto g = generate_dataset(tank, sonar, spec);
    sonar.side = -1;
    for (std::size_t p = 0; p < g.poses.size(); ++p) {
        const auto r = exact_ranges(g.poses[p], tank, sonar);
        for (std::size_t b = 0; b < 5; ++b)
            REQUIRE(g.data.X(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(b)) == r[b]);
    }
}

TEST_CASE("unreachable counts and bad specs are errors")
{
    DatasetSpec spec;
    spec.corner = 100000;
    spec.max_draws = 5000;
    CHECK_THROWS_AS(generate_dataset({}, {}, spec), ValidationError);
    DatasetSpec zero;
    zero.wall = 0;
    CHECK_THROWS_AS(generate_dataset({}, {}, zero), ValidationError);
    DatasetSpec wide;
    wide.offset_max = 3.0;
    CHECK_THROWS_AS(generate_dataset({}, {}, wide), ValidationError);
}

TEST_CASE("ground-truth mission completes every circuit without contact")
{
    for (Direction d : {Direction::clockwise, Direction::anticlockwise}) {
        MissionConfig cfg;
        cfg.direction = d;
        const auto log = run_mission_ground_truth(cfg);
        CHECK(log.summary.completed);
        CHECK_FALSE(log.summary.timed_out);
        CHECK(log.summary.collisions == 0);
        REQUIRE(log.summary.circuits_per_depth.size() == 2);
        CHECK(log.summary.circuits_per_depth[0] == cfg.circuits);
        CHECK(log.summary.circuits_per_depth[1] == cfg.circuits);
        CHECK(log.summary.mean_abs_edge_error <= 0.15);
        CHECK(log.records.back().phase == MissionPhase::done);
    }
}

TEST_CASE("noise-free mission completes and reaches both depths")
{
    const auto log = run_mission_ground_truth(quiet_config());
    CHECK(log.summary.completed);
    CHECK(log.summary.collisions == 0);
    double deepest = 0.0;
    for (const auto& r : log.records)
        deepest = std::max(deepest, r.depth);
    CHECK(deepest == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("missions are deterministic per seed")
{
    MissionConfig cfg;
    cfg.seed = 11;
    const auto a = run_mission_ground_truth(cfg);
    const auto b = run_mission_ground_truth(cfg);
    CHECK(same_records(a.records, b.records));
    cfg.seed = 12;
    const auto c = run_mission_ground_truth(cfg);
    CHECK_FALSE(same_records(a.records, c.records));
}

TEST_CASE("timestamps are monotone and summaries recompute from records")
{
    const auto log = run_mission_ground_truth({});
    for (std::size_t i = 1; i < log.records.size(); ++i)
        REQUIRE(log.records[i].t > log.records[i - 1].t);
    const auto s = summarize(log.records);
    CHECK(s.collisions == log.summary.collisions);
    CHECK(s.mean_abs_edge_error == log.summary.mean_abs_edge_error);
    CHECK(s.mean_abs_edge_error_all == log.summary.mean_abs_edge_error_all);
    CHECK(s.classification_accuracy == log.summary.classification_accuracy);
    CHECK(s.steps == log.records.size());
    const auto& m = s.classification;
    CHECK(m.total() == log.records.size());
}

TEST_CASE("step cap ends the mission with a partial log")
{
    MissionConfig cfg;
    cfg.max_time = 60.0;
    const auto log = run_mission_ground_truth(cfg);
    CHECK_FALSE(log.summary.completed);
    CHECK(log.summary.timed_out);
    CHECK(log.records.size() == 600);
}

TEST_CASE("always-wall scorer never turns and times out")
{
    MissionConfig cfg;
    cfg.max_time = 400.0;
    const auto log = run_mission(cfg, [](const SonarScan&) { return 0.0; });
    CHECK(log.summary.timed_out);
    for (const auto& r : log.records)
        REQUIRE_FALSE(r.behaviors.corner_turn);
}

TEST_CASE("mission config validation")
{
    MissionConfig c;
    CHECK_NOTHROW(c.validate());
    SUBCASE("edge target beyond half width")
    {
        c.edge_distance = 1.3;
        CHECK_THROWS_AS(c.validate(), ValidationError);
    }
    SUBCASE("setpoint below the floor")
    {
        c.depth_setpoints = {0.0, 4.0};
        CHECK_THROWS_AS(c.validate(), ValidationError);
    }
    SUBCASE("no circuits")
    {
        c.circuits = 0;
        CHECK_THROWS_AS(c.validate(), ValidationError);
    }
    SUBCASE("override for a missing wall")
    {
        c.edge_overrides[7] = 0.5;
        CHECK_THROWS_AS(c.validate(), ValidationError);
    }
    SUBCASE("negative noise")
    {
        c.sigma_sonar = -0.1;
        CHECK_THROWS_AS(c.validate(), ValidationError);
    }
    SUBCASE("edge bands out of order")
    {
        c.edge_capture_band = 0.3;
        CHECK_THROWS_AS(c.validate(), ValidationError);
    }
    SUBCASE("zero dt")
    {
        c.dt = 0.0;
        CHECK_THROWS_AS(c.validate(), ValidationError);
    }
    CHECK(MissionConfig{}.edge_target(4) == 1.5);
    CHECK(MissionConfig{}.edge_target(2) == 0.65);
}

TEST_CASE("mission config JSON round-trips and rejects foreign input")
{
    MissionConfig c;
    c.circuits = 3;
    c.direction = Direction::anticlockwise;
    c.controllers.depth.gain_u = 0.75;
    c.tank.corner_radius = 0.5;
    const json j = mission_config_to_json(c);
    const auto back = mission_config_from_json(json::parse(j.dump()));
    CHECK(mission_config_to_json(back) == j);
    CHECK(back.circuits == 3);
    CHECK(back.controllers.depth.gain_u == 0.75);

    // Partial documents keep the base values.
    const auto partial = mission_config_from_json(json{{"circuits", 1}});
    CHECK(partial.circuits == 1);
    CHECK(partial.edge_distance == 0.65);

    CHECK_THROWS_AS(mission_config_from_json(json{{"circuitz", 1}}), ValidationError);
    CHECK_THROWS_AS(mission_config_from_json(json{{"tank", {{"height", 1}}}}), ValidationError);
    CHECK_THROWS_AS(mission_config_from_json(json{{"version", "2.0"}}), ValidationError);
    CHECK_NOTHROW(mission_config_from_json(json{{"version", "1.3"}}));
    CHECK_THROWS_AS(mission_config_from_json(json{{"direction", "up"}}), ValidationError);
}

TEST_CASE("mission CSV has one row per step and a fixed header")
{
    MissionConfig cfg;
    cfg.max_time = 5.0;
    const auto log = run_mission_ground_truth(cfg);
    std::ostringstream out;
    write_mission_csv(out, log.records);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("# fit2felm-mission-log 1.", 0) == 0);
    std::getline(in, line);
    CHECK(line.rfind("t,x,y,depth,heading,r180,r172,r164,r156,r148,raw_score,smoothed_score,class,truth,behaviors,"
                     "u_yaw,u_surge,u_heave",
                     0) == 0);
    std::size_t rows = 0;
    while (std::getline(in, line))
        ++rows;
    CHECK(rows == log.records.size());
    const json s = mission_summary_to_json(log.summary);
    CHECK(s.contains("collisions"));
    CHECK(s.contains("classification_accuracy"));
}
