#include "cvsim/protocol.hpp"

#include <cmath>

#include "cvsim/config.hpp"

namespace cvsim {

namespace {

using nlohmann::json;

double number_field(const json& j, const char* key, const std::string& rid) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number()) throw ProtocolError(rid, std::string("field '") + key + "' must be a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw ProtocolError(rid, std::string("field '") + key + "' must be finite");
    return v;
}

std::string string_field(const json& j, const char* key, const std::string& rid) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) throw ProtocolError(rid, std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

void allow_only(const json& j, std::initializer_list<const char*> extra, const std::string& rid) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k == "v" || k == "type" || k == "request_id") continue;
        bool known = false;
        for (const char* e : extra) known = known || k == e;
        if (!known) throw ProtocolError(rid, "unknown field '" + k + "'");
    }
}

}  // namespace

Command command_from_json(const json& j) {
    if (!j.is_object()) throw ProtocolError("", "frame must be a JSON object");
    std::string rid;
    if (auto it = j.find("request_id"); it != j.end()) {
        if (it->is_string()) {
            rid = it->get<std::string>();
        } else if (it->is_number_integer()) {
            rid = std::to_string(it->get<long long>());
        } else {
            throw ProtocolError("", "field 'request_id' must be a string or integer");
        }
    }
    if (auto it = j.find("v"); it == j.end() || !it->is_number_integer() || it->get<int>() != kProtocolVersion) {
        throw ProtocolError(rid, "unsupported protocol version (field 'v' must be 1)");
    }
    const std::string type = string_field(j, "type", rid);

    Command c;
    c.request_id = rid;
    if (type == "set_flow") {
        allow_only(j, {"approach", "veh_per_hour"}, rid);
        const std::string name = string_field(j, "approach", rid);
        const auto a = parse_approach(name);
        if (!a) throw ProtocolError(rid, "field 'approach' must be one of W, S, E, N");
        const double f = number_field(j, "veh_per_hour", rid);
        if (f < 0.0) throw ProtocolError(rid, "field 'veh_per_hour' must be >= 0");
        c.body = SetFlow{*a, f};
    } else if (type == "set_ratio") {
        allow_only(j, {"ratio"}, rid);
        const double r = number_field(j, "ratio", rid);
        if (r < 0.0 || r > 1.0) throw ProtocolError(rid, "field 'ratio' must be in [0, 1]");
        c.body = SetRatio{r};
    } else if (type == "set_speed") {
        allow_only(j, {"mode"}, rid);
        const auto m = parse_speed_mode(string_field(j, "mode", rid));
        if (!m) throw ProtocolError(rid, "field 'mode' must be one of fast, medium, slow, very-slow, headless");
        c.body = SetSpeed{*m};
    } else if (type == "set_plan") {
        allow_only(j, {"plan"}, rid);
        auto it = j.find("plan");
        if (it == j.end()) throw ProtocolError(rid, "field 'plan' is required");
        try {
            c.body = SetPlan{parse_valid_plan(*it)};
        } catch (const ConfigError& e) {
            throw ProtocolError(rid, e.what());
        }
    } else if (type == "end") {
        allow_only(j, {}, rid);
        c.body = End{};
    } else {
        throw ProtocolError(rid, "unknown command type '" + type + "'");
    }
    return c;
}

Command parse_command(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        throw ProtocolError("", std::string("malformed JSON: ") + e.what());
    }
    return command_from_json(j);
}

std::string_view command_type(const CommandBody& body) noexcept {
    switch (body.index()) {
        case 0: return "set_flow";
        case 1: return "set_ratio";
        case 2: return "set_speed";
        case 3: return "set_plan";
        default: return "end";
    }
}

json to_json(const Command& c) {
    json j{{"v", kProtocolVersion}, {"type", command_type(c.body)}, {"request_id", c.request_id}};
    if (auto* f = std::get_if<SetFlow>(&c.body)) {
        j["approach"] = to_string(f->approach);
        j["veh_per_hour"] = f->veh_per_hour;
    } else if (auto* r = std::get_if<SetRatio>(&c.body)) {
        j["ratio"] = r->ratio;
    } else if (auto* s = std::get_if<SetSpeed>(&c.body)) {
        j["mode"] = to_string(s->mode);
    } else if (auto* p = std::get_if<SetPlan>(&c.body)) {
        j["plan"] = to_json(p->plan);
    }
    return j;
}

json ack_reply(const std::string& request_id) {
    return {{"v", kProtocolVersion}, {"type", "ack"}, {"request_id", request_id}};
}

json error_reply(const std::string& request_id, const std::string& message) {
    return {{"v", kProtocolVersion}, {"type", "error"}, {"request_id", request_id}, {"message", message}};
}

}  // namespace cvsim
