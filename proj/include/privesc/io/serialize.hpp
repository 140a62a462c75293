#pragma once

#include <string>

#include <json.hpp>

#include "privesc/state/agent_state.hpp"
#include "privesc/winsim/host.hpp"

namespace privesc::io {

nlohmann::json to_json(const winsim::EnvConfig& c);
/// Missing keys keep their defaults. Throws std::invalid_argument on bad
/// values (including unknown vulnerability labels).
winsim::EnvConfig env_config_from_json(const nlohmann::json& j);

winsim::VulnMode parse_vuln_mode(std::string_view s);
std::string_view vuln_mode_name(winsim::VulnMode m);

nlohmann::json host_to_json(const winsim::SimHost& h);
std::string format_host(const winsim::SimHost& h);

nlohmann::json state_to_json(const state::AgentState& s);

}  // namespace privesc::io
