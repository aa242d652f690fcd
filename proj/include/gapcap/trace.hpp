#pragma once

#include <vector>

namespace gapcap {

enum class TraceKind {
  kRingdown,
  kOmit,
  kDampingVsPower,
  kFreqVsRadius,
  kQBatch,
  kHeating,
};

const char* to_string(TraceKind kind);

enum class AxisUnit { kSeconds, kRadPerSec };

// A sampled (x, y) measurement series. x strictly increasing, y finite.
struct Trace {
  std::vector<double> x;
  std::vector<double> y;
  TraceKind kind = TraceKind::kRingdown;
  AxisUnit x_unit = AxisUnit::kSeconds;

  void validate() const;
  std::size_t size() const { return x.size(); }
};

}  // namespace gapcap
