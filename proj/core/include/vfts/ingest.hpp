#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vfts {

/// Switching process a curve belongs to. Declaration order is the output
/// order of grouped cycles: (i, Set) precedes (i, Reset).
enum class Process { Set, Reset };

std::string_view to_string(Process process) noexcept;
std::optional<Process> parse_process(std::string_view text);

struct IvSample {
  double voltage = 0.0;  // volts, >= 0
  double current = 0.0;  // amperes, > 0
};

/// One measured sweep, samples sorted by strictly increasing voltage.
struct RawCycle {
  std::size_t cycle_index = 0;
  Process process = Process::Set;
  std::vector<IvSample> samples;
};

/// A truncated curve with its voltage axis divided by the switch voltage.
/// `values` are natural logs of the current; `grid.back()` is 1.
struct RegisteredCurve {
  std::size_t cycle_index = 0;
  Process process = Process::Set;
  double switch_voltage = 0.0;
  std::vector<double> grid;
  std::vector<double> values;
};

enum class JumpDirection { Drop, Rise };

/// Reset events are current drops, set events are current rises.
constexpr JumpDirection default_direction(Process process) noexcept {
  return process == Process::Reset ? JumpDirection::Drop : JumpDirection::Rise;
}

struct SwitchRule {
  double jump_fraction = 0.20;
  std::optional<JumpDirection> direction;  // empty: default_direction(process)
};

/// Reads the `cycle,process,voltage,current` CSV format. Groups rows by
/// (cycle, process), sorts each group by voltage, and orders groups by
/// ascending cycle index then process.
std::vector<RawCycle> parse_cycles(std::istream& in);

/// Writes cycles in the same CSV format, one row per sample, with
/// round-trip precision.
void write_cycles(std::ostream& out, const std::vector<RawCycle>& cycles);

/// Returns the smallest k >= 1 whose relative change from sample k-1
/// exceeds the jump fraction in the rule's direction. The switch point
/// itself is sample k-1.
std::size_t detect_switch_point(const RawCycle& cycle, const SwitchRule& rule = {});

/// Keeps samples 0..switch_index, divides voltages by the switch voltage
/// and log-transforms the currents.
RegisteredCurve register_curve(const RawCycle& cycle, std::size_t switch_index);

/// detect_switch_point followed by register_curve on the last pre-jump sample.
RegisteredCurve ingest_cycle(const RawCycle& cycle, const SwitchRule& rule = {});

}  // namespace vfts
