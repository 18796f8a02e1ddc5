#include "allocate_instance.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "cefl/error.hpp"

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double number(const std::string& text, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw cefl::ConfigError(where + ": bad number '" + text + "'");
  }
  return v;
}

}  // namespace

AllocationInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw cefl::ConfigError("cannot open instance file " + path.string());
  AllocationInstance inst;
  std::set<std::size_t> ids;
  std::string line;
  int line_no = 0;
  const cefl::ChannelParams channel;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw cefl::ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "client" || key == "client_at") {
      std::istringstream s(value);
      std::string id_text, x_text, extra;
      if (!(s >> id_text >> x_text) || (s >> extra)) {
        throw cefl::ConfigError(where + ": expected '<id> <value>'");
      }
      const auto id = static_cast<std::size_t>(number(id_text, where));
      if (!ids.insert(id).second) throw cefl::ConfigError(where + ": duplicate client id");
      const double x = number(x_text, where);
      cefl::ChannelRealization c{id, 0.0, 0.0};
      if (key == "client") {
        if (!(x >= 0.0)) throw cefl::ConfigError(where + ": gain must be non-negative");
        c.gain = x;
      } else {
        if (!(x > 0.0)) throw cefl::ConfigError(where + ": distance must be positive");
        c.distance_m = x;
        c.gain = cefl::pathloss(x, channel);
      }
      inst.clients.push_back(c);
    } else if (key == "bandwidth_hz") {
      inst.budget.total_bandwidth_hz = number(value, where);
    } else if (key == "pmin_dbm") {
      inst.budget.power_min_w = cefl::dbm_to_watts(number(value, where));
    } else if (key == "pmax_dbm") {
      inst.budget.power_max_w = cefl::dbm_to_watts(number(value, where));
    } else if (key == "deadline_s") {
      inst.budget.deadline_s = number(value, where);
    } else if (key == "packet_bits") {
      inst.budget.packet_bits = number(value, where);
    } else if (key == "noise_psd_dbm_per_hz") {
      inst.noise_psd_w_per_hz = cefl::dbm_to_watts(number(value, where));
    } else {
      throw cefl::ConfigError(where + ": unknown key '" + key + "'");
    }
  }
  try {
    inst.budget.validate();
  } catch (const cefl::InvalidInput& e) {
    throw cefl::ConfigError(path.string() + ": " + e.what());
  }
  return inst;
}
