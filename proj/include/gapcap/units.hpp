#pragma once

#include <string>

namespace gapcap {

// Unit families the toolkit's quantities fall into. Frequencies parse to
// cyclic Hz; callers convert to angular rad/s where they cross into the
// physics layer.
enum class UnitFamily {
  kNone,
  kLength,
  kFrequency,
  kPressure,
  kTemperature,
  kMass,
  kTime,
  kCapacitance,
  kInductance,
  kPower,
  kGradient,  // gap change per lateral distance, SI base m/m
};

const char* family_name(UnitFamily family);

struct Quantity {
  double value = 0.0;  // in the family's SI base unit
  UnitFamily family = UnitFamily::kNone;
};

// Parses "<number><suffix>", e.g. "70um", "350MPa", "6GHz", "0.5nm/mm".
// A bare number comes back with family kNone. Unknown suffixes throw.
Quantity parse_quantity(const std::string& text);

// Parses and checks the family; bare numbers are accepted as already being
// in the SI base unit. Errors name the field.
double parse_unit(const std::string& text, UnitFamily expected,
                  const std::string& field);

}  // namespace gapcap
