#include "cvsim/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace cvsim {

std::vector<std::string> validate(const SimConfig& c) {
    std::vector<std::string> v;
    auto need = [&v](bool ok, const char* msg) {
        if (!ok) v.emplace_back(msg);
    };
    need(c.tick_s > 0, "tick_s: must be > 0");
    need(c.a_max > 0, "a_max: must be > 0");
    need(c.v_min >= 0, "v_min: must be >= 0");
    need(c.v_limit > c.v_min, "v_limit: must exceed v_min");
    need(c.desired_speed_factor > 0 && c.desired_speed_factor <= 1, "desired_speed_factor: must be in (0, 1]");
    need(c.vehicle_length > 0, "vehicle_length: must be > 0");
    need(c.s_stop >= c.vehicle_length, "s_stop: must be >= vehicle_length");
    need(c.s_headway_min > 0, "s_headway_min: must be > 0");
    need(c.s_reaction > c.s_headway_min, "s_reaction: must exceed s_headway_min");
    need(c.approach_length > c.s_reaction, "approach_length: must exceed s_reaction");
    need(c.exit_length >= 0, "exit_length: must be >= 0");
    need(c.theta >= 0, "theta: must be >= 0");
    need(c.v_dis > 0 && c.v_dis <= c.v_limit, "v_dis: must be in (0, v_limit]");
    need(c.noise_sigma >= 0, "noise_sigma: must be >= 0");
    need(c.stop_speed_threshold > 0, "stop_speed_threshold: must be > 0");
    need(c.equipped_ratio >= 0 && c.equipped_ratio <= 1, "equipped_ratio: must be in [0, 1]");
    for (auto a : kApproaches) {
        if (!(c.flow(a) >= 0)) v.push_back("flows." + std::string(to_string(a)) + ": must be >= 0");
    }
    return v;
}

void require_valid(const SimConfig& cfg) {
    auto v = validate(cfg);
    if (v.empty()) return;
    std::ostringstream os;
    os << "invalid config: ";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "; " : "") << v[i];
    throw ConfigError(os.str());
}

nlohmann::json to_json(const SimConfig& c) {
    nlohmann::json flows = nlohmann::json::object();
    for (auto a : kApproaches) flows[std::string(to_string(a))] = c.flow(a);
    return {
        {"tick_s", c.tick_s},
        {"a_max", c.a_max},
        {"v_limit", c.v_limit},
        {"v_min", c.v_min},
        {"desired_speed_factor", c.desired_speed_factor},
        {"s_reaction", c.s_reaction},
        {"theta", c.theta},
        {"s_headway_min", c.s_headway_min},
        {"s_stop", c.s_stop},
        {"v_dis", c.v_dis},
        {"vehicle_length", c.vehicle_length},
        {"noise_sigma", c.noise_sigma},
        {"approach_length", c.approach_length},
        {"exit_length", c.exit_length},
        {"stop_speed_threshold", c.stop_speed_threshold},
        {"seed", c.seed},
        {"flows", flows},
        {"equipped_ratio", c.equipped_ratio},
    };
}

namespace {

double number_field(const nlohmann::json& v, const std::string& name) {
    if (!v.is_number()) throw ConfigError(name + ": expected a number");
    return v.get<double>();
}

}  // namespace

SimConfig config_from_json(const nlohmann::json& j, SimConfig base) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    using Setter = std::function<void(SimConfig&, const nlohmann::json&)>;
    auto real = [](double SimConfig::*field, std::string name) -> Setter {
        return [field, name](SimConfig& c, const nlohmann::json& v) { c.*field = number_field(v, name); };
    };
    const std::map<std::string, Setter> setters{
        {"tick_s", real(&SimConfig::tick_s, "tick_s")},
        {"a_max", real(&SimConfig::a_max, "a_max")},
        {"v_limit", real(&SimConfig::v_limit, "v_limit")},
        {"v_min", real(&SimConfig::v_min, "v_min")},
        {"desired_speed_factor", real(&SimConfig::desired_speed_factor, "desired_speed_factor")},
        {"s_reaction", real(&SimConfig::s_reaction, "s_reaction")},
        {"theta", real(&SimConfig::theta, "theta")},
        {"s_headway_min", real(&SimConfig::s_headway_min, "s_headway_min")},
        {"s_stop", real(&SimConfig::s_stop, "s_stop")},
        {"v_dis", real(&SimConfig::v_dis, "v_dis")},
        {"vehicle_length", real(&SimConfig::vehicle_length, "vehicle_length")},
        {"noise_sigma", real(&SimConfig::noise_sigma, "noise_sigma")},
        {"approach_length", real(&SimConfig::approach_length, "approach_length")},
        {"exit_length", real(&SimConfig::exit_length, "exit_length")},
        {"stop_speed_threshold", real(&SimConfig::stop_speed_threshold, "stop_speed_threshold")},
        {"equipped_ratio", real(&SimConfig::equipped_ratio, "equipped_ratio")},
        {"seed",
         [](SimConfig& c, const nlohmann::json& v) {
             if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
                 throw ConfigError("seed: expected a non-negative integer");
             c.seed = v.get<std::uint64_t>();
         }},
        {"flows",
         [](SimConfig& c, const nlohmann::json& v) {
             if (v.is_array()) {
                 if (v.size() != kApproachCount) throw ConfigError("flows: expected 4 values (W,S,E,N)");
                 for (std::size_t i = 0; i < kApproachCount; ++i) c.flows[i] = number_field(v[i], "flows");
                 return;
             }
             if (!v.is_object()) throw ConfigError("flows: expected an object keyed by W,S,E,N");
             for (auto it = v.begin(); it != v.end(); ++it) {
                 auto a = parse_approach(it.key());
                 if (!a) throw ConfigError("flows." + it.key() + ": unknown approach");
                 c.flows[static_cast<std::size_t>(*a)] = number_field(it.value(), "flows." + it.key());
             }
         }},
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto s = setters.find(it.key());
        if (s == setters.end()) throw ConfigError(it.key() + ": unknown config field");
        s->second(base, it.value());
    }
    return base;
}

SimConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: malformed JSON in '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

}  // namespace cvsim
