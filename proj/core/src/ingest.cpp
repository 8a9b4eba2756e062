#include "vfts/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <utility>

#include "vfts/error.hpp"

namespace vfts {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc{} && ptr == end;
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& why) {
  fail(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": " + why);
}

}  // namespace

std::string_view to_string(Process process) noexcept {
  return process == Process::Set ? "set" : "reset";
}

std::optional<Process> parse_process(std::string_view text) {
  const auto key = lower(trim(text));
  if (key == "set") return Process::Set;
  if (key == "reset") return Process::Reset;
  return std::nullopt;
}

std::vector<RawCycle> parse_cycles(std::istream& in) {
  std::map<std::pair<std::size_t, Process>, std::vector<IvSample>> groups;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = trim(line);
    if (view.empty()) continue;
    const auto fields = split_fields(view);
    if (!header_seen) {
      const bool is_header = fields.size() == 4 && lower(fields[0]) == "cycle" &&
                             lower(fields[1]) == "process" && lower(fields[2]) == "voltage" &&
                             lower(fields[3]) == "current";
      if (!is_header) malformed(line_no, "expected header cycle,process,voltage,current");
      header_seen = true;
      continue;
    }
    if (fields.size() != 4) malformed(line_no, "expected 4 fields");
    std::size_t cycle = 0;
    if (!parse_number(fields[0], cycle)) malformed(line_no, "bad cycle index");
    const auto process = parse_process(fields[1]);
    if (!process) malformed(line_no, "process must be set or reset");
    IvSample sample;
    if (!parse_number(fields[2], sample.voltage) || !std::isfinite(sample.voltage))
      malformed(line_no, "bad voltage");
    if (!parse_number(fields[3], sample.current) || !std::isfinite(sample.current))
      malformed(line_no, "bad current");
    if (sample.voltage < 0.0) malformed(line_no, "negative voltage");
    if (!(sample.current > 0.0))
      fail(ErrorCode::NonPositiveCurrent,
           "line " + std::to_string(line_no) + ": current must be strictly positive");
    groups[{cycle, *process}].push_back(sample);
  }

  std::vector<RawCycle> cycles;
  cycles.reserve(groups.size());
  for (auto& [key, samples] : groups) {
    std::stable_sort(samples.begin(), samples.end(),
                     [](const IvSample& a, const IvSample& b) { return a.voltage < b.voltage; });
    for (std::size_t j = 1; j < samples.size(); ++j) {
      if (samples[j].voltage == samples[j - 1].voltage)
        fail(ErrorCode::DuplicateVoltage, "cycle " + std::to_string(key.first) + " " +
                                              std::string(to_string(key.second)) +
                                              ": duplicate voltage");
    }
    cycles.push_back(RawCycle{key.first, key.second, std::move(samples)});
  }
  return cycles;
}

void write_cycles(std::ostream& out, const std::vector<RawCycle>& cycles) {
  out << "cycle,process,voltage,current\n";
  char buf[96];
  for (const auto& cycle : cycles) {
    for (const auto& s : cycle.samples) {
      std::snprintf(buf, sizeof buf, "%zu,%s,%.17g,%.17g\n", cycle.cycle_index,
                    to_string(cycle.process).data(), s.voltage, s.current);
      out << buf;
    }
  }
}

std::size_t detect_switch_point(const RawCycle& cycle, const SwitchRule& rule) {
  if (!(rule.jump_fraction > 0.0 && rule.jump_fraction < 1.0))
    fail(ErrorCode::InvalidArgument, "jump_fraction must lie in (0, 1)");
  const auto direction = rule.direction.value_or(default_direction(cycle.process));
  const auto& s = cycle.samples;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double prev = s[k - 1].current;
    const double change = direction == JumpDirection::Drop ? (prev - s[k].current) / prev
                                                           : (s[k].current - prev) / prev;
    if (change > rule.jump_fraction) return k;
  }
  fail(ErrorCode::NoSwitchPoint, "cycle " + std::to_string(cycle.cycle_index) + " " +
                                     std::string(to_string(cycle.process)) +
                                     ": no consecutive pair exceeds the jump fraction");
}

RegisteredCurve register_curve(const RawCycle& cycle, std::size_t switch_index) {
  if (switch_index >= cycle.samples.size())
    fail(ErrorCode::InvalidArgument, "switch index beyond the last sample");
  const double v_switch = cycle.samples[switch_index].voltage;
  if (!(v_switch > 0.0))
    fail(ErrorCode::ZeroSwitchVoltage,
         "cycle " + std::to_string(cycle.cycle_index) + ": switch voltage is zero");
  if (switch_index < 1)
    fail(ErrorCode::ShortCurve, "cycle " + std::to_string(cycle.cycle_index) +
                                    ": registered curve needs at least two samples");

  RegisteredCurve curve;
  curve.cycle_index = cycle.cycle_index;
  curve.process = cycle.process;
  curve.switch_voltage = v_switch;
  curve.grid.reserve(switch_index + 1);
  curve.values.reserve(switch_index + 1);
  for (std::size_t j = 0; j <= switch_index; ++j) {
    const auto& s = cycle.samples[j];
    if (!(s.current > 0.0))
      fail(ErrorCode::NonPositiveCurrent, "current must be strictly positive");
    curve.grid.push_back(j == switch_index ? 1.0 : s.voltage / v_switch);
    curve.values.push_back(std::log(s.current));
  }
  return curve;
}

RegisteredCurve ingest_cycle(const RawCycle& cycle, const SwitchRule& rule) {
  const auto jump = detect_switch_point(cycle, rule);
  return register_curve(cycle, jump - 1);
}

}  // namespace vfts
