// Copyright 2026 The DPSBCD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpsbcd/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "dpsbcd/errors.hpp"

namespace dpsbcd {
namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool valid_key(std::string_view key) {
  if (key.empty() || key.front() == '.' || key.back() == '.') return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

template <class T>
T parse_integer(const std::string& v, const std::string& key) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": '" + v + "' is not a valid integer");
  }
  return out;
}

double parse_real(const std::string& v, const std::string& key) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key + ": '" + v + "' is not a finite number");
  }
  return out;
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError(key + ": '" + v + "' is not a boolean");
}

std::size_t parse_count(const std::string& v, const std::string& key) {
  return parse_integer<std::size_t>(v, key);
}

std::vector<double> parse_real_list(const std::string& v, const std::string& key) {
  std::vector<double> out;
  for (const auto& p : split(v, ',')) out.push_back(parse_real(p, key));
  return out;
}

std::vector<std::size_t> parse_count_list(const std::string& v, const std::string& key) {
  std::vector<std::size_t> out;
  if (trim(v).empty()) return out;
  for (const auto& p : split(v, ',')) out.push_back(parse_count(p, key));
  return out;
}

// "auto"-style keys: a number or one of the listed words.
std::optional<double> parse_optional_real(const std::string& v, const std::string& key,
                                          std::string_view word) {
  if (v == word) return std::nullopt;
  return parse_real(v, key);
}

using Setter = std::function<void(RunConfig&, const std::string& value, const std::string& key)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"seed", [](RunConfig& c, const std::string& v,
                  const std::string& k) { c.seed = parse_integer<std::uint64_t>(v, k); }},
      {"out", [](RunConfig& c, const std::string& v, const std::string&) { c.out_dir = v; }},

      {"data.path", [](RunConfig& c, const std::string& v,
                       const std::string&) { c.data.path = v; }},
      {"data.seed", [](RunConfig& c, const std::string& v,
                       const std::string& k) { c.data.seed = parse_integer<std::uint64_t>(v, k); }},
      {"data.n", [](RunConfig& c, const std::string& v,
                    const std::string& k) { c.data.generator.n = parse_count(v, k); }},
      {"data.dims", [](RunConfig& c, const std::string& v,
                       const std::string& k) { c.data.generator.dims = parse_count(v, k); }},
      {"data.classes", [](RunConfig& c, const std::string& v,
                          const std::string& k) { c.data.generator.classes = parse_count(v, k); }},
      {"data.informative",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.data.generator.informative = parse_count(v, k);
       }},
      {"data.redundant",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.data.generator.redundant = parse_count(v, k);
       }},
      {"data.clusters_per_class",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.data.generator.clusters_per_class = parse_count(v, k);
       }},
      {"data.separation",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.data.generator.separation = parse_real(v, k);
       }},
      {"data.train_frac",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.data.generator.train_frac = parse_real(v, k);
       }},

      {"train.epochs", [](RunConfig& c, const std::string& v,
                          const std::string& k) { c.train.epochs = parse_integer<std::int64_t>(v, k); }},
      {"train.batch_size", [](RunConfig& c, const std::string& v,
                              const std::string& k) { c.train.batch_size = parse_count(v, k); }},
      {"train.eta", [](RunConfig& c, const std::string& v,
                       const std::string& k) { c.train.eta = parse_real(v, k); }},
      {"train.gamma", [](RunConfig& c, const std::string& v,
                         const std::string& k) { c.train.gamma = parse_real(v, k); }},
      {"train.rho", [](RunConfig& c, const std::string& v,
                       const std::string& k) { c.train.rho = parse_real(v, k); }},
      {"train.rho_per_layer",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.train.rho_per_layer = parse_real_list(v, k);
       }},
      {"train.hidden", [](RunConfig& c, const std::string& v,
                          const std::string& k) { c.train.hidden = parse_count_list(v, k); }},
      {"train.prox",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         try {
           c.train.prox = parse_prox_kind(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(k + ": " + e.what());
         }
       }},
      {"train.schedule", [](RunConfig& c, const std::string& v,
                            const std::string&) { c.train_schedule = v; }},
      {"train.dp", [](RunConfig& c, const std::string& v,
                      const std::string& k) { c.train.dp_enabled = parse_bool(v, k); }},
      {"train.init_variance", [](RunConfig& c, const std::string& v,
                                 const std::string& k) { c.train.init_variance = parse_real(v, k); }},
      {"train.final_normalization",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.train.final_normalization = parse_bool(v, k);
       }},
      {"train.power_iters",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.train.power.max_iters = parse_integer<int>(v, k);
       }},
      {"train.power_tol", [](RunConfig& c, const std::string& v,
                             const std::string& k) { c.train.power.tol = parse_real(v, k); }},

      {"privacy.alpha", [](RunConfig& c, const std::string& v,
                           const std::string& k) { c.privacy.alpha = parse_real(v, k); }},
      {"privacy.L_T", [](RunConfig& c, const std::string& v,
                         const std::string& k) { c.privacy.L_T = parse_real(v, k); }},
      {"privacy.c0", [](RunConfig& c, const std::string& v, const std::string& k) {
         c.privacy.c0 = parse_optional_real(v, k, "init");
       }},
      {"privacy.lipschitz_F", [](RunConfig& c, const std::string& v, const std::string& k) {
         c.privacy.lipschitz_F = parse_optional_real(v, k, "derived");
       }},
      {"privacy.sensitivity", [](RunConfig& c, const std::string& v, const std::string& k) {
         c.privacy.sensitivity = parse_optional_real(v, k, "analytic");
       }},

      {"account.n", [](RunConfig& c, const std::string& v,
                       const std::string& k) { c.account.n = parse_count(v, k); }},
      {"account.b", [](RunConfig& c, const std::string& v,
                       const std::string& k) { c.account.b = parse_count(v, k); }},
      {"account.eta", [](RunConfig& c, const std::string& v,
                         const std::string& k) { c.account.eta = parse_real(v, k); }},
      {"account.epochs",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         try {
           c.account.epochs = parse_int_list(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(k + ": " + e.what());
         }
       }},
      {"account.j0",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         try {
           c.account.j0 = parse_int_list(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(k + ": " + e.what());
         }
       }},

      {"sweep.epochs",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         try {
           c.sweep.epochs = parse_int_list(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(k + ": " + e.what());
         }
       }},
      {"sweep.repeats", [](RunConfig& c, const std::string& v,
                           const std::string& k) { c.sweep.repeats = parse_integer<int>(v, k); }},
      {"sweep.parallel_cells",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.sweep.parallel_cells = parse_bool(v, k);
       }},
  };
  return table;
}

// Keys excluded from the hash: they choose where outputs go, not what they hold.
bool hashed(const std::string& key) { return key != "out"; }

void check_schedule(const std::string& key, const std::string& text,
                    const std::vector<std::int64_t>& epochs) {
  for (std::int64_t K : epochs) {
    try {
      (void)parse_schedule(text, std::max<std::int64_t>(K, 1));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
}

}  // namespace

ConfigMap ConfigMap::parse(std::string_view text, const std::string& source) {
  ConfigMap map;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line =
        text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::string origin = source + ":" + std::to_string(lineno);
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ": expected 'key = value'");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (map.entries_.count(key)) {
      throw ConfigError(origin + ": duplicate key '" + key + "' (first set at " +
                        map.entries_.at(key).origin + ")");
    }
    map.set(key, trim(std::string_view(t).substr(eq + 1)), origin);
  }
  return map;
}

ConfigMap ConfigMap::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void ConfigMap::set(const std::string& key, const std::string& value, const std::string& origin) {
  if (!valid_key(key)) throw ConfigError(origin + ": invalid key '" + key + "'");
  entries_[key] = ConfigEntry{value, origin};
}

void ConfigMap::set_assignment(std::string_view assignment, const std::string& origin) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(origin + ": expected key=value, got '" + std::string(assignment) + "'");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), origin);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::int64_t> parse_int_list(std::string_view text) {
  std::vector<std::int64_t> out;
  const std::string t = trim(text);
  if (t.empty()) throw std::invalid_argument("empty list");
  for (const auto& item : split(t, ',')) {
    const auto parts = split(item, ':');
    std::vector<std::int64_t> v;
    for (const auto& p : parts) {
      std::int64_t x = 0;
      const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), x);
      if (ec != std::errc() || ptr != p.data() + p.size()) {
        throw std::invalid_argument("'" + p + "' is not an integer");
      }
      v.push_back(x);
    }
    if (v.size() == 1) {
      out.push_back(v[0]);
    } else if (v.size() <= 3) {
      const std::int64_t step = v.size() == 3 ? v[2] : 1;
      if (step <= 0 || v[1] < v[0]) throw std::invalid_argument("bad range '" + item + "'");
      for (std::int64_t x = v[0]; x <= v[1]; x += step) out.push_back(x);
    } else {
      throw std::invalid_argument("bad range '" + item + "'");
    }
  }
  return out;
}

RunConfig resolve_config(const ConfigMap& map) {
  RunConfig cfg;
  std::string canonical;
  for (const auto& [key, entry] : map.entries()) {
    if (hashed(key)) canonical += key + "=" + entry.value + "\n";
    const auto& table = setters();
    if (const auto it = table.find(key); it != table.end()) {
      try {
        it->second(cfg, entry.value, key);
      } catch (const ConfigError& e) {
        throw ConfigError(entry.origin + ": " + e.what());
      }
      continue;
    }
    bool matched = false;
    for (const char* prefix : {"account.schedule.", "sweep.schedule."}) {
      if (key.rfind(prefix, 0) != 0) continue;
      const std::string name = key.substr(std::string_view(prefix).size());
      if (name.empty() || name.find('.') != std::string::npos) {
        throw ConfigError(entry.origin + ": bad schedule name in '" + key + "'");
      }
      auto& list = key[0] == 'a' ? cfg.account.schedules : cfg.sweep.schedules;
      list.push_back({name, entry.value});
      matched = true;
    }
    if (!matched) throw ConfigError(entry.origin + ": unknown key '" + key + "'");
  }
  cfg.hash = fnv1a64(canonical);

  try {
    cfg.train.schedule = parse_schedule(cfg.train_schedule, std::max<std::int64_t>(cfg.train.epochs, 1));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("train.schedule: ") + e.what());
  }
  cfg.train.seed = cfg.seed;
  cfg.train.validate();
  for (const auto& s : cfg.account.schedules) {
    check_schedule("account.schedule." + s.name, s.text, cfg.account.epochs);
  }
  for (const auto& s : cfg.sweep.schedules) {
    check_schedule("sweep.schedule." + s.name, s.text, cfg.sweep.epochs);
  }
  if (!(cfg.privacy.alpha > 1.0)) throw ConfigError("privacy.alpha must be > 1");
  if (!(cfg.privacy.L_T > 0.0)) throw ConfigError("privacy.L_T must be > 0");
  if (cfg.privacy.c0 && !(*cfg.privacy.c0 > 0.0)) throw ConfigError("privacy.c0 must be > 0");
  if (cfg.privacy.lipschitz_F && !(*cfg.privacy.lipschitz_F > 0.0)) {
    throw ConfigError("privacy.lipschitz_F must be > 0");
  }
  if (cfg.privacy.sensitivity && !(*cfg.privacy.sensitivity > 0.0)) {
    throw ConfigError("privacy.sensitivity must be > 0");
  }
  if (cfg.account.b == 0 || cfg.account.n % cfg.account.b != 0) {
    throw ConfigError("account.b = " + std::to_string(cfg.account.b) + " must divide account.n = " +
                      std::to_string(cfg.account.n));
  }
  if (!(cfg.account.eta > 0.0)) throw ConfigError("account.eta must be > 0");
  for (std::int64_t K : cfg.account.epochs) {
    if (K < 1) throw ConfigError("account.epochs entries must be >= 1");
  }
  for (std::int64_t K : cfg.sweep.epochs) {
    if (K < 0) throw ConfigError("sweep.epochs entries must be >= 0");
  }
  for (std::int64_t j : cfg.account.j0) {
    if (j < 0 || static_cast<std::size_t>(j) >= cfg.account.n / cfg.account.b) {
      throw ConfigError("account.j0 entry " + std::to_string(j) + " outside [0, n/b)");
    }
  }
  if (cfg.sweep.repeats < 1) throw ConfigError("sweep.repeats must be >= 1");
  if (!cfg.data.path.empty()) cfg.data.path = std::filesystem::absolute(cfg.data.path);
  cfg.out_dir = std::filesystem::absolute(cfg.out_dir);
  return cfg;
}

}  // namespace dpsbcd
