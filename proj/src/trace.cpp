#include "gapcap/trace.hpp"

#include <cmath>
#include <stdexcept>

namespace gapcap {

const char* to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::kRingdown:
      return "ringdown";
    case TraceKind::kOmit:
      return "omit";
    case TraceKind::kDampingVsPower:
      return "damping-vs-power";
    case TraceKind::kFreqVsRadius:
      return "freq-vs-radius";
    case TraceKind::kQBatch:
      return "q-batch";
    case TraceKind::kHeating:
      return "heating";
  }
  return "unknown";
}

void Trace::validate() const {
  if (x.size() != y.size()) {
    throw std::invalid_argument("trace x/y lengths differ");
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) {
      throw std::invalid_argument("trace x values must be strictly increasing");
    }
  }
  for (double value : y) {
    if (!std::isfinite(value)) {
      throw std::invalid_argument("trace y values must be finite");
    }
  }
}

}  // namespace gapcap
