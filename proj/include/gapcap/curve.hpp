#pragma once

#include <string>
#include <vector>

namespace gapcap {

// Piecewise-linear property curve sampled at strictly increasing temperatures.
// Evaluation outside the sampled span is a hard error, not an extrapolation.
class PiecewiseCurve {
 public:
  PiecewiseCurve() = default;
  PiecewiseCurve(std::vector<double> temperatures, std::vector<double> values,
                 std::string name = "");

  // Linear interpolation; exact at sample points.
  // Throws std::out_of_range naming the span for T outside it.
  double operator()(double temperature_k) const;

  double min_temperature() const { return temps_.front(); }
  double max_temperature() const { return temps_.back(); }
  bool covers(double t_low, double t_high) const {
    return min_temperature() <= t_low && t_high <= max_temperature();
  }

  const std::vector<double>& temperatures() const { return temps_; }
  const std::vector<double>& values() const { return values_; }
  const std::string& name() const { return name_; }

 private:
  std::vector<double> temps_;
  std::vector<double> values_;
  std::string name_;
};

// Free-function spelling of curve evaluation.
double interpolate_property(const PiecewiseCurve& curve, double temperature_k);

}  // namespace gapcap
