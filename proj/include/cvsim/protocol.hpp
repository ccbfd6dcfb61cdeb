#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "cvsim/signal.hpp"
#include "cvsim/speed_mode.hpp"
#include "cvsim/types.hpp"

namespace cvsim {

inline constexpr int kProtocolVersion = 1;

struct SetFlow {
    Approach approach = Approach::W;
    double veh_per_hour = 0.0;
};
struct SetRatio {
    double ratio = 0.0;
};
struct SetSpeed {
    SpeedMode mode = SpeedMode::Headless;
};
struct SetPlan {
    SignalPlan plan;
};
struct End {};

using CommandBody = std::variant<SetFlow, SetRatio, SetSpeed, SetPlan, End>;

/// A steering command from a client. Frames look like
///   {"v":1,"type":"set_flow","request_id":"7","approach":"W","veh_per_hour":1800}
///   {"v":1,"type":"set_ratio","request_id":"8","ratio":0.7}
///   {"v":1,"type":"set_speed","request_id":"9","mode":"fast"}
///   {"v":1,"type":"set_plan","request_id":"10","plan":{"cycle_s":90,"lanes":{...}}}
///   {"v":1,"type":"end","request_id":"11"}
struct Command {
    std::string request_id;
    CommandBody body;
};

/// Rejected frame. request_id is filled when the frame carried one.
class ProtocolError : public std::runtime_error {
public:
    ProtocolError(std::string request_id, const std::string& message)
        : std::runtime_error(message), request_id_(std::move(request_id)) {}
    const std::string& request_id() const noexcept { return request_id_; }

private:
    std::string request_id_;
};

/// Parses and fully validates a command frame; a plan is checked against the timeline
/// invariants here so that an accepted command can always be applied.
Command parse_command(std::string_view text);
Command command_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Command& c);
std::string_view command_type(const CommandBody& body) noexcept;

nlohmann::json ack_reply(const std::string& request_id);
nlohmann::json error_reply(const std::string& request_id, const std::string& message);

}  // namespace cvsim
