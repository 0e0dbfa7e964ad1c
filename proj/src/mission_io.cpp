#include "fit2/io.hpp"
#include "fit2/mission.hpp"

#include <ostream>
#include <set>

namespace fit2
{

namespace
{

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where)
{
    if (!j.is_object())
        throw ValidationError(where + ": expected an object");
    std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        if (!known.count(k))
            throw ValidationError(where + ": unknown key '" + k + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

} // namespace

json fpd_config_to_json(const FPDConfig& c)
{
    return {{"gain_e", c.gain_e},         {"gain_de", c.gain_de}, {"gain_u", c.gain_u},
            {"u_min", c.u_min},           {"u_max", c.u_max},     {"fou_spread", c.fou_spread},
            {"rule_table", c.rule_table}};
}

FPDConfig fpd_config_from_json(const json& j, FPDConfig c)
{
    reject_unknown(j, {"gain_e", "gain_de", "gain_u", "u_min", "u_max", "fou_spread", "rule_table"}, "controller");
    read(j, "gain_e", c.gain_e);
    read(j, "gain_de", c.gain_de);
    read(j, "gain_u", c.gain_u);
    read(j, "u_min", c.u_min);
    read(j, "u_max", c.u_max);
    read(j, "fou_spread", c.fou_spread);
    if (j.contains("rule_table")) {
        const auto v = j.at("rule_table").get<std::vector<double>>();
        if (v.size() != 9)
            throw ValidationError("controller rule_table must hold 9 consequents");
        std::copy(v.begin(), v.end(), c.rule_table.begin());
    }
    c.validate();
    return c;
}

json mission_config_to_json(const MissionConfig& cfg)
{
    json overrides = json::object();
    for (const auto& [wall, d] : cfg.edge_overrides)
        overrides[std::to_string(wall)] = d;
    return {
        {"format", mission_format_name},
        {"version", std::to_string(mission_format_major) + ".0"},
        {"circuits", cfg.circuits},
        {"depth_setpoints", cfg.depth_setpoints},
        {"edge_distance", cfg.edge_distance},
        {"edge_overrides", overrides},
        {"direction", to_string(cfg.direction)},
        {"noise", {{"sonar", cfg.sigma_sonar}, {"compass", cfg.sigma_compass}, {"depth", cfg.sigma_depth}}},
        {"dt", cfg.dt},
        {"seed", cfg.seed},
        {"tank",
         {{"width", cfg.tank.width},
          {"length", cfg.tank.length},
          {"depth", cfg.tank.depth},
          {"corner_radius", cfg.tank.corner_radius}}},
        {"vehicle",
         {{"max_speed", cfg.vehicle.max_speed},
          {"max_yaw_rate", cfg.vehicle.max_yaw_rate},
          {"max_vertical_speed", cfg.vehicle.max_vertical_speed},
          {"time_constant", cfg.vehicle.time_constant},
          {"hull_radius", cfg.vehicle.hull_radius}}},
        {"sonar", {{"beam_angles", cfg.sonar.beam_angles}, {"datum", cfg.sonar.datum}}},
        {"thresholds",
         {{"heading_deg", cfg.thresholds.heading_deg},
          {"depth_m", cfg.thresholds.depth_m},
          {"class_threshold", cfg.thresholds.class_threshold},
          {"corner_steps", cfg.thresholds.corner_steps}}},
        {"controllers",
         {{"heading", fpd_config_to_json(cfg.controllers.heading)},
          {"depth", fpd_config_to_json(cfg.controllers.depth)},
          {"edge", fpd_config_to_json(cfg.controllers.edge)}}},
        {"smoothing_window", cfg.smoothing_window},
        {"edge_beam", cfg.edge_beam},
        {"max_edge_offset", cfg.max_edge_offset},
        {"approach_offset", cfg.approach_offset},
        {"edge_capture_band", cfg.edge_capture_band},
        {"edge_release_band", cfg.edge_release_band},
        {"turn_rate", cfg.turn_rate},
        {"depth_rate", cfg.depth_rate},
        {"cruise_surge", cfg.cruise_surge},
        {"acquire_band", cfg.acquire_band},
        {"depth_settle_steps", cfg.depth_settle_steps},
        {"max_time", cfg.max_time},
    };
}

MissionConfig mission_config_from_json(const json& j, MissionConfig cfg)
{
    try {
        reject_unknown(j,
                       {"format", "version", "circuits", "depth_setpoints", "edge_distance", "edge_overrides",
                        "direction", "noise", "dt", "seed", "tank", "vehicle", "sonar", "thresholds", "controllers",
                        "smoothing_window", "edge_beam", "max_edge_offset", "approach_offset",
                        "edge_capture_band", "edge_release_band", "turn_rate", "depth_rate",
                        "cruise_surge", "acquire_band", "depth_settle_steps", "max_time"},
                       "mission config");
        if (j.contains("format") && j.at("format").get<std::string>() != mission_format_name)
            throw ValidationError("mission config: format must be '" + std::string(mission_format_name) + "'");
        if (j.contains("version"))
            check_format_version(j, "mission config", mission_format_major);

        read(j, "circuits", cfg.circuits);
        read(j, "depth_setpoints", cfg.depth_setpoints);
        read(j, "edge_distance", cfg.edge_distance);
        if (j.contains("edge_overrides")) {
            cfg.edge_overrides.clear();
            for (const auto& [k, v] : j.at("edge_overrides").items()) {
                std::size_t used = 0;
                int wall = 0;
                try {
                    wall = std::stoi(k, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != k.size())
                    throw ValidationError("mission config: edge_overrides keys must be wall ids, got '" + k + "'");
                cfg.edge_overrides[wall] = v.get<double>();
            }
        }
        if (j.contains("direction"))
            cfg.direction = direction_from_string(j.at("direction").get<std::string>());
        if (j.contains("noise")) {
            const auto& n = j.at("noise");
            reject_unknown(n, {"sonar", "compass", "depth"}, "mission config noise");
            read(n, "sonar", cfg.sigma_sonar);
            read(n, "compass", cfg.sigma_compass);
            read(n, "depth", cfg.sigma_depth);
        }
        read(j, "dt", cfg.dt);
        read(j, "seed", cfg.seed);
        if (j.contains("tank")) {
            const auto& t = j.at("tank");
            reject_unknown(t, {"width", "length", "depth", "corner_radius"}, "mission config tank");
            read(t, "width", cfg.tank.width);
            read(t, "length", cfg.tank.length);
            read(t, "depth", cfg.tank.depth);
            read(t, "corner_radius", cfg.tank.corner_radius);
        }
        if (j.contains("vehicle")) {
            const auto& v = j.at("vehicle");
            reject_unknown(v, {"max_speed", "max_yaw_rate", "max_vertical_speed", "time_constant", "hull_radius"},
                           "mission config vehicle");
            read(v, "max_speed", cfg.vehicle.max_speed);
            read(v, "max_yaw_rate", cfg.vehicle.max_yaw_rate);
            read(v, "max_vertical_speed", cfg.vehicle.max_vertical_speed);
            read(v, "time_constant", cfg.vehicle.time_constant);
            read(v, "hull_radius", cfg.vehicle.hull_radius);
        }
        if (j.contains("sonar")) {
            const auto& s = j.at("sonar");
            reject_unknown(s, {"beam_angles", "datum"}, "mission config sonar");
            if (s.contains("beam_angles")) {
                const auto v = s.at("beam_angles").get<std::vector<double>>();
                if (v.size() != 5)
                    throw ValidationError("mission config: sonar needs exactly 5 beam angles");
                std::copy(v.begin(), v.end(), cfg.sonar.beam_angles.begin());
            }
            read(s, "datum", cfg.sonar.datum);
        }
        if (j.contains("thresholds")) {
            const auto& t = j.at("thresholds");
            reject_unknown(t, {"heading_deg", "depth_m", "class_threshold", "corner_steps"},
                           "mission config thresholds");
            read(t, "heading_deg", cfg.thresholds.heading_deg);
            read(t, "depth_m", cfg.thresholds.depth_m);
            read(t, "class_threshold", cfg.thresholds.class_threshold);
            read(t, "corner_steps", cfg.thresholds.corner_steps);
        }
        if (j.contains("controllers")) {
            const auto& c = j.at("controllers");
            reject_unknown(c, {"heading", "depth", "edge"}, "mission config controllers");
            if (c.contains("heading"))
                cfg.controllers.heading = fpd_config_from_json(c.at("heading"), cfg.controllers.heading);
            if (c.contains("depth"))
                cfg.controllers.depth = fpd_config_from_json(c.at("depth"), cfg.controllers.depth);
            if (c.contains("edge"))
                cfg.controllers.edge = fpd_config_from_json(c.at("edge"), cfg.controllers.edge);
        }
        read(j, "smoothing_window", cfg.smoothing_window);
        read(j, "edge_beam", cfg.edge_beam);
        read(j, "max_edge_offset", cfg.max_edge_offset);
        read(j, "approach_offset", cfg.approach_offset);
        read(j, "edge_capture_band", cfg.edge_capture_band);
        read(j, "edge_release_band", cfg.edge_release_band);
        read(j, "turn_rate", cfg.turn_rate);
        read(j, "depth_rate", cfg.depth_rate);
        read(j, "cruise_surge", cfg.cruise_surge);
        read(j, "acquire_band", cfg.acquire_band);
        read(j, "depth_settle_steps", cfg.depth_settle_steps);
        read(j, "max_time", cfg.max_time);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("mission config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

void write_mission_csv(std::ostream& out, const std::vector<StepRecord>& records)
{
    out << "# " << mission_format_name << "-log " << mission_format_major << ".0\n";
    out << "t,x,y,depth,heading,r180,r172,r164,r156,r148,raw_score,smoothed_score,class,truth,behaviors,"
           "u_yaw,u_surge,u_heave,phase,wall,edge_target,wall_distance,acquired,collided\n";
    for (const auto& r : records) {
        out << to_decimal(r.t) << ',' << to_decimal(r.x) << ',' << to_decimal(r.y) << ',' << to_decimal(r.depth)
            << ',' << to_decimal(r.heading);
        for (double v : r.ranges)
            out << ',' << to_decimal(v);
        out << ',' << to_decimal(r.raw_score) << ',' << to_decimal(r.smoothed_score) << ',' << r.predicted << ','
            << r.truth << ',' << r.behaviors.names() << ',' << to_decimal(r.u_yaw) << ',' << to_decimal(r.u_surge)
            << ',' << to_decimal(r.u_heave) << ',' << to_string(r.phase) << ',' << r.wall << ','
            << to_decimal(r.edge_target) << ',' << to_decimal(r.wall_distance) << ',' << (r.acquired ? 1 : 0) << ','
            << (r.collided ? 1 : 0) << '\n';
    }
}

json mission_summary_to_json(const MissionSummary& s)
{
    const auto& c = s.classification.counts;
    return {
        {"format", "fit2felm-mission-summary"},
        {"version", std::to_string(mission_format_major) + ".0"},
        {"completed", s.completed},
        {"timed_out", s.timed_out},
        {"circuits_per_depth", s.circuits_per_depth},
        {"collisions", s.collisions},
        {"mean_abs_edge_error", s.mean_abs_edge_error},
        {"edge_samples", s.edge_samples},
        {"mean_abs_edge_error_all", s.mean_abs_edge_error_all},
        {"classification_accuracy", s.classification_accuracy},
        {"confusion", {{"wall", {{"wall", c[0][0]}, {"corner", c[0][1]}}},
                       {"corner", {{"wall", c[1][0]}, {"corner", c[1][1]}}}}},
        {"classification_events", s.classification.total()},
        {"steps", s.steps},
        {"sim_time", s.sim_time},
    };
}

} // namespace fit2
