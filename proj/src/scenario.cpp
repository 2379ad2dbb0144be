// Copyright 2026 The inpipe Authors
//
// SPDX-License-Identifier: Apache-2.0

#include "scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "error.hpp"

namespace inpipe {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

class LineError {
 public:
  LineError(std::string_view origin, std::size_t line)
      : prefix_(std::string(origin) + ":" + std::to_string(line) + ": ") {}

  [[noreturn]] void operator()(const std::string& msg) const {
    throw Error(ErrorCode::Parse, prefix_ + msg);
  }

 private:
  std::string prefix_;
};

double to_number(std::string_view tok, const LineError& fail) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    fail("expected a number, got '" + std::string(tok) + "'");
  return v;
}

double to_diameter(std::string_view tok, const LineError& fail) {
  if (tok == "3in") return geometry::kBore3in;
  if (tok == "4in") return geometry::kBore4in;
  return to_number(tok, fail);
}

bool to_bool(std::string_view tok, const LineError& fail) {
  if (tok == "1" || tok == "true" || tok == "yes" || tok == "on") return true;
  if (tok == "0" || tok == "false" || tok == "no" || tok == "off") return false;
  fail("expected a boolean, got '" + std::string(tok) + "'");
}

void parse_pipe_line(const std::vector<std::string_view>& t, Scenario& sc,
                     const LineError& fail) {
  const std::string_view kind = t[0];
  if (kind == "straight") {
    if (t.size() != 4) fail("usage: straight <len_m> <D_m> <incl>");
    sc.pipe.push_back(geometry::PipeSegment::straight(
        to_number(t[1], fail), to_diameter(t[2], fail), to_number(t[3], fail)));
  } else if (kind == "bend") {
    if (t.size() != 5) fail("usage: bend <radius_m> <deg> <D_m> <incl>");
    sc.pipe.push_back(geometry::PipeSegment::bend(
        to_number(t[1], fail), to_number(t[2], fail) * kDegToRad,
        to_diameter(t[3], fail), to_number(t[4], fail)));
  } else if (kind == "increaser") {
    if (t.size() == 4) {
      sc.pipe.push_back(geometry::PipeSegment::increaser(
          geometry::kDefaultIncreaserLength, to_diameter(t[1], fail),
          to_diameter(t[2], fail), to_number(t[3], fail)));
    } else if (t.size() == 5) {
      sc.pipe.push_back(geometry::PipeSegment::increaser(
          to_number(t[1], fail), to_diameter(t[2], fail),
          to_diameter(t[3], fail), to_number(t[4], fail)));
    } else {
      fail("usage: increaser [len_m] <Din_m> <Dout_m> <incl>");
    }
  } else {
    fail("unknown pipe segment '" + std::string(kind) + "'");
  }
}

using Setter = std::function<void(Scenario&, std::string_view, const LineError&)>;

Setter number_field(double robot::RobotParams::*field) {
  return [field](Scenario& sc, std::string_view v, const LineError& f) {
    sc.robot.*field = to_number(v, f);
  };
}

Setter thermal_field(double actuation::ThermalConstants::*field) {
  return [field](Scenario& sc, std::string_view v, const LineError& f) {
    sc.thermal.*field = to_number(v, f);
  };
}

const std::map<std::string, Setter, std::less<>>& robot_keys() {
  using RP = robot::RobotParams;
  using TC = actuation::ThermalConstants;
  static const std::map<std::string, Setter, std::less<>> keys = {
      {"link_joint_to_joint_m", number_field(&RP::link_joint_to_joint_m)},
      {"end_link_m", number_field(&RP::end_link_m)},
      {"wheel_radius_m", number_field(&RP::wheel_radius_m)},
      {"total_mass_kg", number_field(&RP::total_mass_kg)},
      {"total_extended_length_m", number_field(&RP::total_extended_length_m)},
      {"spring_stiffness_Nm_per_rad",
       number_field(&RP::spring_stiffness_Nm_per_rad)},
      {"max_cont_joint_torque_Nm", number_field(&RP::max_cont_joint_torque_Nm)},
      {"peak_joint_torque_Nm", number_field(&RP::peak_joint_torque_Nm)},
      {"max_speed_m_s", number_field(&RP::max_speed_m_s)},
      {"max_cont_traction_N", number_field(&RP::max_cont_traction_N)},
      {"peak_traction_N", number_field(&RP::peak_traction_N)},
      {"thermal_ambient_C", thermal_field(&TC::ambient_C)},
      {"thermal_soft_limit_C", thermal_field(&TC::soft_limit_C)},
      {"thermal_heat_W_per_duty2", thermal_field(&TC::heat_W_per_duty2)},
      {"thermal_r_th_C_per_W", thermal_field(&TC::r_th_C_per_W)},
      {"thermal_c_th_J_per_C", thermal_field(&TC::c_th_J_per_C)},
      {"peak_mode",
       [](Scenario& sc, std::string_view v, const LineError& f) {
         sc.peak_mode = to_bool(v, f);
       }},
      {"torque_map",
       [](Scenario& sc, std::string_view v, const LineError& f) {
         try {
           sc.torque_map = actuation::parse_torque_map_mode(v);
         } catch (const Error& e) {
           f(e.what());
         }
       }},
      {"pot_fullscale_deg",
       [](Scenario& sc, std::string_view v, const LineError& f) {
         sc.pot.angle_fullscale_rad = to_number(v, f) * kDegToRad;
       }},
      {"pot_noise_sigma_v",
       [](Scenario& sc, std::string_view v, const LineError& f) {
         sc.pot.noise_sigma_v = to_number(v, f);
       }},
      {"kp_duty_per_rad",
       [](Scenario& sc, std::string_view v, const LineError& f) {
         sc.gains.kp_duty_per_rad = to_number(v, f);
       }},
      {"ki_duty_per_rad_s",
       [](Scenario& sc, std::string_view v, const LineError& f) {
         sc.gains.ki_duty_per_rad_s = to_number(v, f);
       }},
  };
  return keys;
}

void parse_robot_line(std::string_view line, Scenario& sc,
                      const LineError& fail) {
  std::string_view key, value;
  if (const auto eq = line.find('='); eq != std::string_view::npos) {
    key = trim(line.substr(0, eq));
    value = trim(line.substr(eq + 1));
  } else {
    const auto t = split_ws(line);
    if (t.size() != 2) fail("expected 'key = value'");
    key = t[0];
    value = t[1];
  }
  const auto& keys = robot_keys();
  const auto it = keys.find(key);
  if (it == keys.end()) fail("unknown robot parameter '" + std::string(key) + "'");
  it->second(sc, value, fail);
}

void parse_env_line(const std::vector<std::string_view>& t, Scenario& sc,
                    const LineError& fail, bool& have_base) {
  if (t[0] != "env") fail("expected 'env mu=<f> cable=<N> label=<str>'");
  mechanics::Environment env;
  double from = -1.0, to = -1.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const auto eq = t[i].find('=');
    if (eq == std::string_view::npos)
      fail("expected key=value, got '" + std::string(t[i]) + "'");
    const auto key = t[i].substr(0, eq);
    const auto value = t[i].substr(eq + 1);
    if (key == "mu") env.mu = to_number(value, fail);
    else if (key == "cable") env.cable_drag_N = to_number(value, fail);
    else if (key == "label") env.label = std::string(value);
    else if (key == "from") from = to_number(value, fail);
    else if (key == "to") to = to_number(value, fail);
    else fail("unknown env key '" + std::string(key) + "'");
  }
  try {
    if (from < 0.0 && to < 0.0) {
      if (have_base) fail("base environment declared twice");
      sc.env.set_base(env);
      have_base = true;
    } else {
      sc.env.add_range(from, to, env);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Parse) throw;
    fail(e.what());
  }
}

void parse_mission_line(const std::vector<std::string_view>& t, Scenario& sc,
                        const LineError& fail) {
  const std::string_view head = t[0];
  auto single = [&](std::string_view usage) {
    if (t.size() != 2) fail("usage: " + std::string(usage));
    return to_number(t[1], fail);
  };
  if (head == "interactive") {
    if (t.size() > 2) fail("usage: interactive [bool]");
    sc.interactive = t.size() == 1 || to_bool(t[1], fail);
  } else if (head == "seed") {
    const double v = single("seed <N>");
    if (v < 0 || v != std::floor(v)) fail("seed must be a non-negative integer");
    sc.seed = static_cast<std::uint64_t>(v);
  } else if (head == "dt") {
    sc.dt_s = single("dt <s>");
  } else if (head == "max_time") {
    sc.max_time_s = single("max_time <s>");
  } else if (head == "stall_window") {
    sc.stall_window_s = single("stall_window <s>");
  } else if (head == "bus_latency_ms") {
    sc.bus_latency_s = single("bus_latency_ms <ms>") / 1000.0;
  } else if (head == "bus_loss") {
    sc.bus_loss = single("bus_loss <p>");
  } else if (head == "at") {
    if (t.size() < 3) fail("usage: at <t_s> <action> [value]");
    MissionStep step;
    step.t_s = to_number(t[1], fail);
    try {
      step.action.kind = parse_action_kind(t[2]);
    } catch (const Error& e) {
      fail(e.what());
    }
    const bool takes_value = step.action.kind != ActionKind::Stop &&
                             step.action.kind != ActionKind::Estop &&
                             step.action.kind != ActionKind::ResetEstop;
    if (takes_value != (t.size() == 4))
      fail(std::string(to_string(step.action.kind)) +
           (takes_value ? " needs a value" : " takes no value"));
    if (takes_value) step.action.value = to_number(t[3], fail);
    try {
      validate(step.action);
    } catch (const Error& e) {
      fail(e.what());
    }
    if (step.t_s < 0.0) fail("mission time must be >= 0");
    if (!sc.mission.empty() && step.t_s < sc.mission.back().t_s)
      fail("mission times must be non-decreasing");
    sc.mission.push_back(step);
  } else {
    fail("unknown mission directive '" + std::string(head) + "'");
  }
}

}  // namespace

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Stop: return "stop";
    case ActionKind::Drive: return "drive";
    case ActionKind::Roll: return "roll";
    case ActionKind::JointDuty: return "joint_duty";
    case ActionKind::JointAngle: return "joint_angle";
    case ActionKind::Estop: return "estop";
    case ActionKind::ResetEstop: return "reset_estop";
  }
  return "?";
}

ActionKind parse_action_kind(std::string_view verb) {
  static constexpr ActionKind kinds[] = {
      ActionKind::Stop,       ActionKind::Drive, ActionKind::Roll,
      ActionKind::JointDuty,  ActionKind::JointAngle, ActionKind::Estop,
      ActionKind::ResetEstop};
  for (ActionKind k : kinds)
    if (to_string(k) == verb) return k;
  throw Error(ErrorCode::InvalidArgument,
              "unknown action '" + std::string(verb) + "'");
}

void validate(const Action& action) {
  auto require = [&](bool ok, const char* what) {
    if (!ok || !std::isfinite(action.value))
      throw Error(ErrorCode::OutOfRange,
                  std::string(to_string(action.kind)) + " value " +
                      std::to_string(action.value) + " " + what);
  };
  switch (action.kind) {
    case ActionKind::Drive:
    case ActionKind::Roll:
      require(action.value >= -100.0 && action.value <= 100.0,
              "outside [-100, 100]");
      break;
    case ActionKind::JointDuty:
      require(action.value >= 0.0 && action.value <= 100.0,
              "outside [0, 100]");
      break;
    case ActionKind::JointAngle:
      require(std::abs(action.value) <= 327.67, "outside +/-327.67 deg");
      break;
    default:
      break;
  }
}

void Scenario::validate() const {
  if (pipe.empty())
    throw Error(ErrorCode::InvalidArgument, "scenario has no [pipe] segments");
  robot.validate();
  thermal.validate();
  if (!(dt_s > 0.0) || !(max_time_s > 0.0))
    throw Error(ErrorCode::InvalidArgument, "dt and max_time must be positive");
  const double ticks = 0.01 / dt_s;
  if (std::abs(ticks - std::round(ticks)) > 1e-9)
    throw Error(ErrorCode::InvalidArgument,
                "dt must divide the 10 ms control tick");
  if (stall_window_s < 2.0)
    throw Error(ErrorCode::InvalidArgument, "stall window must be >= 2 s");
  if (!(bus_latency_s >= 0.0) || !(bus_loss >= 0.0 && bus_loss <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "invalid bus settings");
  for (std::size_t i = 1; i < mission.size(); ++i)
    if (mission[i].t_s < mission[i - 1].t_s)
      throw Error(ErrorCode::InvalidArgument,
                  "mission times must be non-decreasing");
}

void Scenario::override_joint_duty(double duty_pct) {
  Action probe{ActionKind::JointDuty, duty_pct};
  inpipe::validate(probe);
  for (auto& step : mission)
    if (step.action.kind == ActionKind::JointDuty) step.action.value = duty_pct;
}

Scenario parse_scenario(std::string_view text, std::string_view origin) {
  enum class Section { None, Pipe, Robot, Env, Mission };
  Scenario sc;
  Section section = Section::None;
  bool have_base_env = false;
  bool in_header = true;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const LineError fail(origin, line_no);

    std::string_view line = trim(raw);
    if (line.starts_with('#')) {
      if (in_header) {
        const auto body = trim(line.substr(1));
        if (!sc.description.empty()) sc.description += '\n';
        sc.description += body;
      }
      continue;
    }
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    in_header = false;

    if (line.front() == '[') {
      if (line == "[pipe]") section = Section::Pipe;
      else if (line == "[robot]") section = Section::Robot;
      else if (line == "[env]") section = Section::Env;
      else if (line == "[mission]") section = Section::Mission;
      else fail("unknown section " + std::string(line));
      continue;
    }

    const auto tokens = split_ws(line);
    switch (section) {
      case Section::None:
        fail("content before the first section header");
      case Section::Pipe:
        parse_pipe_line(tokens, sc, fail);
        break;
      case Section::Robot:
        parse_robot_line(line, sc, fail);
        break;
      case Section::Env:
        parse_env_line(tokens, sc, fail, have_base_env);
        break;
      case Section::Mission:
        parse_mission_line(tokens, sc, fail);
        break;
    }
  }

  try {
    sc.validate();
    (void)geometry::build_network(sc.pipe);
  } catch (const Error& e) {
    throw Error(ErrorCode::Parse, std::string(origin) + ": " + e.what());
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open scenario '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  Scenario sc = parse_scenario(buf.str(), path);
  auto name = path.substr(path.find_last_of('/') + 1);
  if (const auto dot = name.rfind('.'); dot != std::string::npos)
    name.resize(dot);
  sc.name = name;
  return sc;
}

std::string describe_defaults() {
  const Scenario sc;
  const auto& r = sc.robot;
  const auto& t = sc.thermal;
  std::string out = "[robot]\n";
  char line[128];
  auto emit = [&](const char* key, double v) {
    std::snprintf(line, sizeof line, "%s = %.10g\n", key, v);
    out += line;
  };
  emit("link_joint_to_joint_m", r.link_joint_to_joint_m);
  emit("end_link_m", r.end_link_m);
  emit("wheel_radius_m", r.wheel_radius_m);
  emit("total_mass_kg", r.total_mass_kg);
  emit("total_extended_length_m", r.total_extended_length_m);
  emit("spring_stiffness_Nm_per_rad", r.spring_stiffness_Nm_per_rad);
  emit("max_cont_joint_torque_Nm", r.max_cont_joint_torque_Nm);
  emit("peak_joint_torque_Nm", r.peak_joint_torque_Nm);
  emit("max_speed_m_s", r.max_speed_m_s);
  emit("max_cont_traction_N", r.max_cont_traction_N);
  emit("peak_traction_N", r.peak_traction_N);
  emit("thermal_ambient_C", t.ambient_C);
  emit("thermal_soft_limit_C", t.soft_limit_C);
  emit("thermal_heat_W_per_duty2", t.heat_W_per_duty2);
  emit("thermal_r_th_C_per_W", t.r_th_C_per_W);
  emit("thermal_c_th_J_per_C", t.c_th_J_per_C);
  out += "peak_mode = 0\n";
  out += "torque_map = anchors\n";
  emit("pot_fullscale_deg", sc.pot.angle_fullscale_rad / kDegToRad);
  emit("pot_noise_sigma_v", sc.pot.noise_sigma_v);
  emit("kp_duty_per_rad", sc.gains.kp_duty_per_rad);
  emit("ki_duty_per_rad_s", sc.gains.ki_duty_per_rad_s);
  std::snprintf(line, sizeof line,
                "\n# environment defaults\n# env mu=%.3g cable=0 label=dry\n"
                "# env mu=%.3g cable=%.3g label=sewage\n",
                mechanics::kMuDry, mechanics::kMuSewage,
                mechanics::kFieldCableDragN);
  out += line;
  return out;
}

}  // namespace inpipe
