#include "cefl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "cefl/error.hpp"

namespace cefl {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
std::string fmt_int(T v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("key '" + std::string(key) + "': expected a finite number, got '" +
                      std::string(v) + "'");
  }
  return out;
}

template <typename T>
T parse_int(std::string_view key, std::string_view v) {
  T out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("key '" + std::string(key) + "': expected a non-negative integer, got '" +
                      std::string(v) + "'");
  }
  return out;
}

bool parse_switch(std::string_view key, std::string_view v) {
  if (v == "on" || v == "true") return true;
  if (v == "off" || v == "false") return false;
  throw ConfigError("key '" + std::string(key) + "': expected on/off, got '" + std::string(v) + "'");
}

std::vector<double> parse_list(std::string_view key, std::string_view v) {
  std::vector<double> out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(parse_double(key, trim(v.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

[[noreturn]] void bad_choice(std::string_view key, std::string_view v, std::string_view allowed) {
  throw ConfigError("key '" + std::string(key) + "': unknown value '" + std::string(v) +
                    "' (allowed: " + std::string(allowed) + ")");
}

using Setter = std::function<void(SimConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"seed", [](SimConfig& c, auto k, auto v) { c.seed = parse_int<std::uint64_t>(k, v); }},
      {"clients", [](SimConfig& c, auto k, auto v) { c.clients = parse_int<std::size_t>(k, v); }},
      {"dimension",
       [](SimConfig& c, auto k, auto v) { c.dimension = parse_int<std::size_t>(k, v); }},
      {"samples_per_client",
       [](SimConfig& c, auto k, auto v) { c.samples_per_client = parse_int<std::size_t>(k, v); }},
      {"loss",
       [](SimConfig& c, auto k, auto v) {
         if (v == "ridge") c.loss = LossKind::Ridge;
         else if (v == "logistic") c.loss = LossKind::Logistic;
         else bad_choice(k, v, "ridge, logistic");
       }},
      {"lambda", [](SimConfig& c, auto k, auto v) { c.lambda = parse_double(k, v); }},
      {"label_noise", [](SimConfig& c, auto k, auto v) { c.label_noise = parse_double(k, v); }},
      {"partition",
       [](SimConfig& c, auto k, auto v) {
         if (v == "iid") c.partition = PartitionMode::Iid;
         else if (v == "label-shards") c.partition = PartitionMode::LabelShards;
         else bad_choice(k, v, "iid, label-shards");
       }},
      {"shards_per_client",
       [](SimConfig& c, auto k, auto v) { c.shards_per_client = parse_int<std::size_t>(k, v); }},
      {"eta",
       [](SimConfig& c, auto k, auto v) {
         if (v == "1/L") {
           c.eta_mode = EtaMode::InverseL;
           c.eta = 0.0;
         } else {
           c.eta_mode = EtaMode::Explicit;
           c.eta = parse_double(k, v);
         }
       }},
      {"local_epochs", [](SimConfig& c, auto k, auto v) { c.local_epochs = parse_int<int>(k, v); }},
      {"censor_window",
       [](SimConfig& c, auto k, auto v) { c.censor_window = parse_int<std::size_t>(k, v); }},
      {"censor_intensity",
       [](SimConfig& c, auto k, auto v) { c.censor_intensity = parse_double(k, v); }},
      {"censor_delta", [](SimConfig& c, auto k, auto v) { c.censor_delta = parse_list(k, v); }},
      {"staleness_limit",
       [](SimConfig& c, auto k, auto v) { c.staleness_limit = parse_int<int>(k, v); }},
      {"bandwidth_hz", [](SimConfig& c, auto k, auto v) { c.bandwidth_hz = parse_double(k, v); }},
      {"pmin_dbm", [](SimConfig& c, auto k, auto v) { c.pmin_dbm = parse_double(k, v); }},
      {"pmax_dbm", [](SimConfig& c, auto k, auto v) { c.pmax_dbm = parse_double(k, v); }},
      {"deadline_s", [](SimConfig& c, auto k, auto v) { c.deadline_s = parse_double(k, v); }},
      {"packet_bits",
       [](SimConfig& c, auto k, auto v) {
         if (v == "auto") c.packet_bits.reset();
         else c.packet_bits = parse_double(k, v);
       }},
      {"carrier_hz", [](SimConfig& c, auto k, auto v) { c.carrier_hz = parse_double(k, v); }},
      {"pathloss_exponent",
       [](SimConfig& c, auto k, auto v) { c.pathloss_exponent = parse_double(k, v); }},
      {"noise_psd_dbm_per_hz",
       [](SimConfig& c, auto k, auto v) { c.noise_psd_dbm_per_hz = parse_double(k, v); }},
      {"fading_variance",
       [](SimConfig& c, auto k, auto v) { c.fading_variance = parse_double(k, v); }},
      {"inner_radius_m",
       [](SimConfig& c, auto k, auto v) { c.inner_radius_m = parse_double(k, v); }},
      {"outer_radius_m",
       [](SimConfig& c, auto k, auto v) { c.outer_radius_m = parse_double(k, v); }},
      {"outage", [](SimConfig& c, auto k, auto v) { c.outage = parse_switch(k, v); }},
      {"rounds", [](SimConfig& c, auto k, auto v) { c.rounds = parse_int<std::size_t>(k, v); }},
      {"target_gap",
       [](SimConfig& c, auto k, auto v) {
         if (v == "none") c.target_gap.reset();
         else c.target_gap = parse_double(k, v);
       }},
      {"algorithm",
       [](SimConfig& c, auto k, auto v) {
         try {
           c.algorithm = parse_algorithm(v);
         } catch (const InvalidInput&) {
           bad_choice(k, v, "cefl, fedavg-uniform, cefl-uniform");
         }
       }},
      {"stale_copy",
       [](SimConfig& c, auto k, auto v) {
         if (v == "frozen") c.stale_copy = StaleCopyRule::Frozen;
         else if (v == "rebased") c.stale_copy = StaleCopyRule::Rebased;
         else bad_choice(k, v, "frozen, rebased");
       }},
  };
  return table;
}

void require(bool ok, const char* message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Cefl: return "cefl";
    case Algorithm::FedAvgUniform: return "fedavg-uniform";
    case Algorithm::CeflUniform: return "cefl-uniform";
  }
  return "?";
}

std::string_view to_string(PartitionMode m) {
  return m == PartitionMode::Iid ? "iid" : "label-shards";
}

std::string_view to_string(StaleCopyRule r) {
  return r == StaleCopyRule::Frozen ? "frozen" : "rebased";
}

Algorithm parse_algorithm(std::string_view s) {
  if (s == "cefl") return Algorithm::Cefl;
  if (s == "fedavg-uniform") return Algorithm::FedAvgUniform;
  if (s == "cefl-uniform") return Algorithm::CeflUniform;
  throw InvalidInput("unknown algorithm '" + std::string(s) + "'");
}

void SimConfig::validate() const {
  require(clients >= 1, "clients must be >= 1");
  require(dimension >= 1, "dimension must be >= 1");
  require(samples_per_client >= 1, "samples_per_client must be >= 1");
  require(lambda > 0.0, "lambda must be positive");
  require(label_noise >= 0.0, "label_noise must be non-negative");
  require(shards_per_client >= 1, "shards_per_client must be >= 1");
  if (partition == PartitionMode::LabelShards) {
    require(samples_per_client >= shards_per_client,
            "label-shards partition needs samples_per_client >= shards_per_client");
  }
  if (eta_mode == EtaMode::Explicit) require(eta > 0.0, "eta must be positive");
  require(local_epochs >= 1, "local_epochs must be >= 1");
  require(censor_window >= 1, "censor_window must be >= 1");
  require(censor_intensity >= 0.0, "censor_intensity must be non-negative");
  if (censor_delta) {
    require(censor_delta->size() == censor_window, "censor_delta must have censor_window entries");
    for (double d : *censor_delta) require(d >= 0.0, "censor_delta entries must be non-negative");
  }
  require(staleness_limit >= 1, "staleness_limit must be >= 1");
  require(bandwidth_hz >= 0.0, "bandwidth_hz must be non-negative");
  require(pmin_dbm <= pmax_dbm, "pmin_dbm must not exceed pmax_dbm");
  require(deadline_s > 0.0, "deadline_s must be positive");
  if (packet_bits) require(*packet_bits > 0.0, "packet_bits must be positive");
  require(carrier_hz > 0.0, "carrier_hz must be positive");
  require(pathloss_exponent > 0.0, "pathloss_exponent must be positive");
  require(fading_variance > 0.0, "fading_variance must be positive");
  require(inner_radius_m > 0.0, "inner_radius_m must be positive");
  require(outer_radius_m >= inner_radius_m, "outer_radius_m must be >= inner_radius_m");
  if (target_gap) require(*target_gap > 0.0, "target_gap must be positive");
}

double SimConfig::packet_size_bits() const {
  return packet_bits ? *packet_bits : 32.0 * static_cast<double>(dimension);
}

ResourceBudget SimConfig::budget() const {
  ResourceBudget b;
  b.total_bandwidth_hz = bandwidth_hz;
  b.power_min_w = dbm_to_watts(pmin_dbm);
  b.power_max_w = dbm_to_watts(pmax_dbm);
  b.deadline_s = deadline_s;
  b.packet_bits = packet_size_bits();
  return b;
}

ChannelParams SimConfig::channel() const {
  ChannelParams p;
  p.carrier_hz = carrier_hz;
  p.pathloss_exponent = pathloss_exponent;
  p.noise_psd_w_per_hz = dbm_to_watts(noise_psd_dbm_per_hz);
  p.fading_variance = fading_variance;
  return p;
}

SimConfig parse_config(std::string_view text) {
  SimConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) +
                        "'");
    }
    if (!seen.emplace(key).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" +
                        std::string(key) + "'");
    }
    if (value.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty value for '" +
                        std::string(key) + "'");
    }
    it->second(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string serialize_config(const SimConfig& c) {
  std::string out;
  auto put = [&out](std::string_view key, const std::string& value) {
    out.append(key).append(" = ").append(value).push_back('\n');
  };
  put("seed", fmt_int(c.seed));
  put("clients", fmt_int(c.clients));
  put("dimension", fmt_int(c.dimension));
  put("samples_per_client", fmt_int(c.samples_per_client));
  put("loss", c.loss == LossKind::Ridge ? "ridge" : "logistic");
  put("lambda", fmt(c.lambda));
  put("label_noise", fmt(c.label_noise));
  put("partition", std::string(to_string(c.partition)));
  put("shards_per_client", fmt_int(c.shards_per_client));
  put("eta", c.eta_mode == EtaMode::InverseL ? std::string("1/L") : fmt(c.eta));
  put("local_epochs", fmt_int(c.local_epochs));
  put("censor_window", fmt_int(c.censor_window));
  put("censor_intensity", fmt(c.censor_intensity));
  if (c.censor_delta) {
    std::string list;
    for (std::size_t k = 0; k < c.censor_delta->size(); ++k) {
      if (k) list += ", ";
      list += fmt((*c.censor_delta)[k]);
    }
    put("censor_delta", list);
  }
  put("staleness_limit", fmt_int(c.staleness_limit));
  put("bandwidth_hz", fmt(c.bandwidth_hz));
  put("pmin_dbm", fmt(c.pmin_dbm));
  put("pmax_dbm", fmt(c.pmax_dbm));
  put("deadline_s", fmt(c.deadline_s));
  put("packet_bits", c.packet_bits ? fmt(*c.packet_bits) : std::string("auto"));
  put("carrier_hz", fmt(c.carrier_hz));
  put("pathloss_exponent", fmt(c.pathloss_exponent));
  put("noise_psd_dbm_per_hz", fmt(c.noise_psd_dbm_per_hz));
  put("fading_variance", fmt(c.fading_variance));
  put("inner_radius_m", fmt(c.inner_radius_m));
  put("outer_radius_m", fmt(c.outer_radius_m));
  put("outage", c.outage ? "on" : "off");
  put("rounds", fmt_int(c.rounds));
  put("target_gap", c.target_gap ? fmt(*c.target_gap) : std::string("none"));
  put("algorithm", std::string(to_string(c.algorithm)));
  put("stale_copy", std::string(to_string(c.stale_copy)));
  return out;
}

}  // namespace cefl
