#include "riskscore/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "riskscore/errors.hpp"

namespace riskscore {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> to_integer(const std::string& s) {
  Int v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::optional<bool> to_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  return std::nullopt;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct Field {
  std::string section;
  std::string key;
  std::string type;  // for messages
  std::function<bool(EngineConfig&, const std::string&)> assign;
  std::function<std::string(const EngineConfig&)> render;  // empty: leave the key out
};

// `get` is a generic lambda returning a reference into the config, so it
// serves both the mutable and the const path.
template <class Get>
Field real_field(std::string section, std::string key, Get get) {
  return {std::move(section), std::move(key), "a real number",
          [get](EngineConfig& c, const std::string& v) {
            const auto d = to_double(v);
            if (d) get(c) = *d;
            return d.has_value();
          },
          [get](const EngineConfig& c) { return format_double(get(c)); }};
}

template <class Int, class Get>
Field integer_field(std::string section, std::string key, Get get) {
  return {std::move(section), std::move(key), "an integer",
          [get](EngineConfig& c, const std::string& v) {
            const auto i = to_integer<Int>(v);
            if (i) get(c) = *i;
            return i.has_value();
          },
          [get](const EngineConfig& c) { return std::to_string(get(c)); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(real_field("risk", "d_min", [](auto& c) -> auto& { return c.risk.d_min; }));
    f.push_back(real_field("risk", "mu0", [](auto& c) -> auto& { return c.risk.mu0; }));
    f.push_back(real_field("risk", "sigma0", [](auto& c) -> auto& { return c.risk.sigma0; }));
    f.push_back(integer_field<Minutes>("risk", "delta_t_max",
                                       [](auto& c) -> auto& { return c.risk.delta_t_max; }));
    f.push_back(real_field("risk", "r_min", [](auto& c) -> auto& { return c.risk.r_min; }));
    f.push_back(real_field("risk", "rssi_ref", [](auto& c) -> auto& { return c.risk.rssi_ref; }));
    f.push_back(real_field("risk", "rssi_ref_distance",
                           [](auto& c) -> auto& { return c.risk.rssi_ref_distance; }));
    f.push_back(real_field("risk", "path_loss_exponent",
                           [](auto& c) -> auto& { return c.risk.path_loss_exponent; }));
    f.push_back({"risk", "include_post_onset_events", "true or false",
                 [](EngineConfig& c, const std::string& v) {
                   const auto b = to_bool(v);
                   if (b) c.risk.include_post_onset_events = *b;
                   return b.has_value();
                 },
                 [](const EngineConfig& c) {
                   return std::string(c.risk.include_post_onset_events ? "true" : "false");
                 }});

    f.push_back(real_field("epi", "incubation_meanlog",
                           [](auto& c) -> auto& { return c.epi.incubation_meanlog; }));
    f.push_back(real_field("epi", "incubation_sdlog",
                           [](auto& c) -> auto& { return c.epi.incubation_sdlog; }));
    f.push_back(real_field("epi", "generation_shape",
                           [](auto& c) -> auto& { return c.epi.generation_shape; }));
    f.push_back(real_field("epi", "generation_scale",
                           [](auto& c) -> auto& { return c.epi.generation_scale; }));

    f.push_back(real_field("prob", "nu", [](auto& c) -> auto& { return c.prob.nu; }));
    f.push_back(real_field("prob", "p_min", [](auto& c) -> auto& { return c.prob.p_min; }));
    f.push_back(integer_field<std::size_t>("prob", "mc_samples",
                                           [](auto& c) -> auto& { return c.prob.mc_samples; }));
    f.push_back(real_field("prob", "grid_step", [](auto& c) -> auto& { return c.prob.grid_step; }));
    f.push_back(integer_field<std::uint64_t>("prob", "seed",
                                             [](auto& c) -> auto& { return c.prob.seed; }));
    f.push_back(real_field("prob", "ks_bound", [](auto& c) -> auto& { return c.prob.ks_bound; }));
    f.push_back(integer_field<std::size_t>("prob", "grid_size",
                                           [](auto& c) -> auto& { return c.prob.grid_size; }));
    f.push_back(integer_field<std::size_t>("prob", "mcmc_samples",
                                           [](auto& c) -> auto& { return c.prob.mcmc_samples; }));
    f.push_back({"prob", "mcmc_burn_in", "an integer",
                 [](EngineConfig& c, const std::string& v) {
                   const auto i = to_integer<std::size_t>(v);
                   if (i) c.prob.mcmc_burn_in = *i;
                   return i.has_value();
                 },
                 [](const EngineConfig& c) {
                   return c.prob.mcmc_burn_in ? std::to_string(*c.prob.mcmc_burn_in) : std::string();
                 }});
    f.push_back(real_field("prob", "mcmc_step", [](auto& c) -> auto& { return c.prob.mcmc_step; }));
    return f;
  }();
  return table;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const Field& f : fields()) {
    if (f.section == section && f.key == key) return &f;
  }
  return nullptr;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diagonal + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diagonal = above;
    }
  }
  return row[b.size()];
}

std::string unknown_key_message(const std::string& section, const std::string& key) {
  std::string message = section + "." + key + ": unknown key";
  const Field* best = nullptr;
  std::size_t best_distance = 0;
  for (const Field& f : fields()) {
    const std::size_t d = edit_distance(key, f.key) + (f.section == section ? 0 : 1);
    if (!best || d < best_distance) {
      best = &f;
      best_distance = d;
    }
  }
  if (best && best_distance * 2 <= std::max(key.size(), best->key.size())) {
    message += "; did you mean '" + best->key + "'";
    if (best->section != section) message += " in [" + best->section + "]";
    message += "?";
  }
  return message;
}

void check_invariants(const EngineConfig& c, std::vector<std::string>& problems) {
  try {
    c.risk.validate();
  } catch (const ValidationError& e) {
    problems.insert(problems.end(), e.problems().begin(), e.problems().end());
  }
  if (!std::isfinite(c.epi.incubation_meanlog)) problems.emplace_back("epi.incubation_meanlog: must be finite");
  if (!(c.epi.incubation_sdlog > 0.0)) problems.emplace_back("epi.incubation_sdlog: must be > 0");
  if (!(c.epi.generation_shape > 0.0)) problems.emplace_back("epi.generation_shape: must be > 0");
  if (!(c.epi.generation_scale > 0.0)) problems.emplace_back("epi.generation_scale: must be > 0");
  if (!(c.prob.nu > 0.0 && c.prob.nu < 1.0)) problems.emplace_back("prob.nu: must lie in (0, 1)");
  if (!(c.prob.p_min > 0.0 && c.prob.p_min < 1.0)) problems.emplace_back("prob.p_min: must lie in (0, 1)");
  if (c.prob.mc_samples < 10'000) problems.emplace_back("prob.mc_samples: must be >= 10000");
  if (!(c.prob.grid_step > 0.0)) problems.emplace_back("prob.grid_step: must be > 0");
  if (!(c.prob.ks_bound > 0.0 && c.prob.ks_bound <= 1.0)) problems.emplace_back("prob.ks_bound: must lie in (0, 1]");
  if (c.prob.grid_size < 64) problems.emplace_back("prob.grid_size: must be >= 64");
  if (c.prob.mcmc_samples < 1000) problems.emplace_back("prob.mcmc_samples: must be >= 1000");
  if (!(c.prob.mcmc_step > 0.0)) problems.emplace_back("prob.mcmc_step: must be > 0");
}

}  // namespace

EngineConfig parse_config(std::string_view text) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({"line " + std::to_string(e.line()) + ": " + e.message()});
  }

  EngineConfig config;
  std::vector<std::string> problems;
  for (const auto& [section, body] : tree) {
    if (section != "risk" && section != "epi" && section != "prob") {
      problems.push_back(body.empty() ? section + ": key outside any section"
                                      : "[" + section + "]: unknown section");
      continue;
    }
    for (const auto& [key, node] : body) {
      const std::string value = trim(node.data());
      if (key == "note") {
        config.notes[section] = value;
        continue;
      }
      const Field* field = find_field(section, key);
      if (!field) {
        problems.push_back(unknown_key_message(section, key));
      } else if (!field->assign(config, value)) {
        problems.push_back(section + "." + key + ": expected " + field->type + ", got '" + value + "'");
      }
    }
  }
  check_invariants(config, problems);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return config;
}

EngineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open config file"});
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string render_config(const EngineConfig& config) {
  std::ostringstream out;
  std::string current;
  for (const Field& f : fields()) {
    if (f.section != current) {
      if (!current.empty()) out << '\n';
      current = f.section;
      out << '[' << current << "]\n";
      if (const auto it = config.notes.find(current); it != config.notes.end()) {
        out << "note = " << it->second << '\n';
      }
    }
    const std::string value = f.render(config);
    if (!value.empty()) out << f.key << " = " << value << '\n';
  }
  return out.str();
}

}  // namespace riskscore
