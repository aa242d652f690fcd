#include "gapcap/units.hpp"

#include <cstdlib>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gapcap {

const char* family_name(UnitFamily family) {
  switch (family) {
    case UnitFamily::kNone:
      return "dimensionless";
    case UnitFamily::kLength:
      return "length";
    case UnitFamily::kFrequency:
      return "frequency";
    case UnitFamily::kPressure:
      return "pressure";
    case UnitFamily::kTemperature:
      return "temperature";
    case UnitFamily::kMass:
      return "mass";
    case UnitFamily::kTime:
      return "time";
    case UnitFamily::kCapacitance:
      return "capacitance";
    case UnitFamily::kInductance:
      return "inductance";
    case UnitFamily::kPower:
      return "power";
    case UnitFamily::kGradient:
      return "gap gradient";
  }
  return "unknown";
}

namespace {

struct Suffix {
  const char* text;
  double factor;
  UnitFamily family;
};

// Longest-match table; order only matters within equal-length collisions.
const std::vector<Suffix>& suffix_table() {
  static const std::vector<Suffix> table = {
      {"nm/mm", 1e-6, UnitFamily::kGradient},
      {"um/mm", 1e-3, UnitFamily::kGradient},
      {"nm/m", 1e-9, UnitFamily::kGradient},
      {"m/m", 1.0, UnitFamily::kGradient},
      {"fm", 1e-15, UnitFamily::kLength},
      {"pm", 1e-12, UnitFamily::kLength},
      {"nm", 1e-9, UnitFamily::kLength},
      {"um", 1e-6, UnitFamily::kLength},
      {"mm", 1e-3, UnitFamily::kLength},
      {"m", 1.0, UnitFamily::kLength},
      {"Hz", 1.0, UnitFamily::kFrequency},
      {"kHz", 1e3, UnitFamily::kFrequency},
      {"MHz", 1e6, UnitFamily::kFrequency},
      {"GHz", 1e9, UnitFamily::kFrequency},
      {"Pa", 1.0, UnitFamily::kPressure},
      {"kPa", 1e3, UnitFamily::kPressure},
      {"MPa", 1e6, UnitFamily::kPressure},
      {"GPa", 1e9, UnitFamily::kPressure},
      {"uK", 1e-6, UnitFamily::kTemperature},
      {"mK", 1e-3, UnitFamily::kTemperature},
      {"K", 1.0, UnitFamily::kTemperature},
      {"kg", 1.0, UnitFamily::kMass},
      {"pg", 1e-15, UnitFamily::kMass},
      {"ng", 1e-12, UnitFamily::kMass},
      {"ug", 1e-9, UnitFamily::kMass},
      {"mg", 1e-6, UnitFamily::kMass},
      {"g", 1e-3, UnitFamily::kMass},
      {"ns", 1e-9, UnitFamily::kTime},
      {"us", 1e-6, UnitFamily::kTime},
      {"ms", 1e-3, UnitFamily::kTime},
      {"s", 1.0, UnitFamily::kTime},
      {"aF", 1e-18, UnitFamily::kCapacitance},
      {"fF", 1e-15, UnitFamily::kCapacitance},
      {"pF", 1e-12, UnitFamily::kCapacitance},
      {"nF", 1e-9, UnitFamily::kCapacitance},
      {"F", 1.0, UnitFamily::kCapacitance},
      {"pH", 1e-12, UnitFamily::kInductance},
      {"nH", 1e-9, UnitFamily::kInductance},
      {"uH", 1e-6, UnitFamily::kInductance},
      {"mH", 1e-3, UnitFamily::kInductance},
      {"H", 1.0, UnitFamily::kInductance},
      {"aW", 1e-18, UnitFamily::kPower},
      {"fW", 1e-15, UnitFamily::kPower},
      {"pW", 1e-12, UnitFamily::kPower},
      {"nW", 1e-9, UnitFamily::kPower},
      {"uW", 1e-6, UnitFamily::kPower},
      {"mW", 1e-3, UnitFamily::kPower},
      {"W", 1.0, UnitFamily::kPower},
  };
  return table;
}

}  // namespace

Quantity parse_quantity(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t");
  std::size_t end = text.find_last_not_of(" \t");
  if (begin == std::string::npos) {
    throw std::invalid_argument("empty quantity");
  }
  std::string trimmed = text.substr(begin, end - begin + 1);
  const char* c_str = trimmed.c_str();
  char* num_end = nullptr;
  double value = std::strtod(c_str, &num_end);
  if (num_end == c_str) {
    throw std::invalid_argument("quantity '" + trimmed +
                                "' does not start with a number");
  }
  std::string suffix(num_end);
  std::size_t s_begin = suffix.find_first_not_of(" \t");
  suffix = s_begin == std::string::npos ? "" : suffix.substr(s_begin);
  if (suffix.empty()) {
    return Quantity{value, UnitFamily::kNone};
  }
  for (const Suffix& entry : suffix_table()) {
    if (suffix == entry.text) {
      return Quantity{value * entry.factor, entry.family};
    }
  }
  throw std::invalid_argument("unknown unit '" + suffix + "' in '" + trimmed +
                              "'");
}

double parse_unit(const std::string& text, UnitFamily expected,
                  const std::string& field) {
  Quantity q;
  try {
    q = parse_quantity(text);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(field + ": " + e.what());
  }
  if (q.family != UnitFamily::kNone && q.family != expected) {
    throw std::invalid_argument(field + ": expected a " +
                                family_name(expected) + " unit, got " +
                                family_name(q.family));
  }
  return q.value;
}

}  // namespace gapcap
