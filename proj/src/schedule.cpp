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

#include "dpsbcd/schedule.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace dpsbcd {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double eval_basic(const BasicSchedule& s, std::int64_t k) {
  const double kd = static_cast<double>(k);
  return std::visit(
      Overloaded{
          [](const ConstantSchedule& c) { return c.o0; },
          [kd](const LinearDecaySchedule& c) { return std::max(c.floor, c.o0 - c.slope * kd); },
          [kd](const LinearIncreaseSchedule& c) { return c.o0 + c.slope * kd; },
      },
      s);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string basic_to_string(const BasicSchedule& s) {
  return std::visit(Overloaded{
                        [](const ConstantSchedule& c) { return "constant(" + num(c.o0) + ")"; },
                        [](const LinearDecaySchedule& c) {
                          return "linear_decay(" + num(c.o0) + "," + num(c.slope) + "," +
                                 num(c.floor) + ")";
                        },
                        [](const LinearIncreaseSchedule& c) {
                          return "linear_increase(" + num(c.o0) + "," + num(c.slope) + ")";
                        },
                    },
                    s);
}

std::string strip(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  }
  return out;
}

[[noreturn]] void fail(std::string_view text, const std::string& why) {
  throw std::invalid_argument("bad schedule '" + std::string(text) + "': " + why);
}

double parse_number(std::string_view full, std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    fail(full, "'" + std::string(s) + "' is not a number");
  }
  return v;
}

std::int64_t parse_epoch(std::string_view full, std::string_view s) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0) {
    fail(full, "'" + std::string(s) + "' is not an epoch index");
  }
  return v;
}

// Splits "name(a,b,c)" into name and argument list.
std::pair<std::string, std::vector<std::string>> split_call(std::string_view full,
                                                            std::string_view s, char sep) {
  const auto open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') fail(full, "expected name(args)");
  std::string name(s.substr(0, open));
  std::string_view body = s.substr(open + 1, s.size() - open - 2);
  std::vector<std::string> args;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '(') ++depth;
    if (body[i] == ')') --depth;
    if (body[i] == sep && depth == 0) {
      args.emplace_back(body.substr(start, i - start));
      start = i + 1;
    }
  }
  if (!body.empty()) args.emplace_back(body.substr(start));
  return {name, args};
}

BasicSchedule parse_basic(std::string_view full, std::string_view s, std::int64_t epochs) {
  auto [name, args] = split_call(full, s, ',');
  std::vector<double> v;
  for (const auto& a : args) v.push_back(parse_number(full, a));
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (v.size() < lo || v.size() > hi) fail(full, name + " takes " + std::to_string(lo) +
                                                       (lo == hi ? "" : "-" + std::to_string(hi)) +
                                                       " arguments");
  };
  if (name == "constant") {
    arity(1, 1);
    return ConstantSchedule{v[0]};
  }
  if (name == "linear_decay") {
    arity(2, 3);
    return LinearDecaySchedule{v[0], v[1], v.size() == 3 ? v[2] : 1e-6};
  }
  if (name == "linear_increase") {
    arity(2, 2);
    return LinearIncreaseSchedule{v[0], v[1]};
  }
  if (name == "decay_to") {
    arity(2, 2);
    if (epochs < 1) fail(full, "decay_to needs at least one epoch");
    return LinearDecaySchedule{v[0] + v[1] * static_cast<double>(epochs - 1), v[1], v[0]};
  }
  fail(full, "unknown schedule '" + name + "'");
}

}  // namespace

double eval_schedule(const NoiseSchedule& s, double /*eta*/, std::int64_t k, std::int64_t j) {
  if (k < 0 || j < 0) {
    throw std::invalid_argument("eval_schedule: negative index (k=" + std::to_string(k) +
                                ", j=" + std::to_string(j) + ")");
  }
  double o = 0.0;
  if (const auto* pw = std::get_if<PiecewiseSchedule>(&s)) {
    const auto it = std::find_if(pw->segments.begin(), pw->segments.end(),
                                 [k](const ScheduleSegment& seg) {
                                   return seg.begin <= k && k < seg.end;
                                 });
    if (it == pw->segments.end()) {
      throw std::invalid_argument("eval_schedule: no segment covers epoch " + std::to_string(k));
    }
    o = eval_basic(it->schedule, k);
  } else {
    o = std::visit(Overloaded{
                       [](const PiecewiseSchedule&) { return 0.0; },
                       [k](const auto& basic) { return eval_basic(BasicSchedule{basic}, k); },
                   },
                   s);
  }
  if (!(o > 0.0) || !std::isfinite(o)) {
    throw std::domain_error("noise schedule value " + num(o) + " at epoch " + std::to_string(k) +
                            ", batch " + std::to_string(j) + " is not positive");
  }
  return o;
}

NoiseSchedule parse_schedule(std::string_view text, std::int64_t epochs) {
  const std::string s = strip(text);
  if (s.empty()) fail(text, "empty");
  if (s.rfind("piecewise(", 0) == 0) {
    auto [name, parts] = split_call(text, s, ';');
    PiecewiseSchedule pw;
    for (const auto& part : parts) {
      const auto eq = part.find('=');
      const auto colon = part.find(':');
      if (eq == std::string::npos || colon == std::string::npos || colon > eq) {
        fail(text, "segment '" + part + "' is not B:E=schedule");
      }
      ScheduleSegment seg;
      seg.begin = parse_epoch(text, std::string_view(part).substr(0, colon));
      const std::string_view end = std::string_view(part).substr(colon + 1, eq - colon - 1);
      if (!end.empty()) seg.end = parse_epoch(text, end);
      if (seg.end <= seg.begin) fail(text, "segment '" + part + "' is empty");
      seg.schedule = parse_basic(text, std::string_view(part).substr(eq + 1), epochs);
      pw.segments.push_back(seg);
    }
    if (pw.segments.empty()) fail(text, "piecewise needs at least one segment");
    return pw;
  }
  return std::visit([](const auto& b) -> NoiseSchedule { return b; }, parse_basic(text, s, epochs));
}

std::string schedule_to_string(const NoiseSchedule& s) {
  if (const auto* pw = std::get_if<PiecewiseSchedule>(&s)) {
    std::string out = "piecewise(";
    for (std::size_t i = 0; i < pw->segments.size(); ++i) {
      const auto& seg = pw->segments[i];
      if (i) out += ";";
      out += std::to_string(seg.begin) + ":";
      if (seg.end != std::numeric_limits<std::int64_t>::max()) out += std::to_string(seg.end);
      out += "=" + basic_to_string(seg.schedule);
    }
    return out + ")";
  }
  return std::visit(Overloaded{
                        [](const PiecewiseSchedule&) { return std::string(); },
                        [](const auto& basic) { return basic_to_string(BasicSchedule{basic}); },
                    },
                    s);
}

}  // namespace dpsbcd
