#include "gapcap/curve.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace gapcap {

PiecewiseCurve::PiecewiseCurve(std::vector<double> temperatures,
                               std::vector<double> values, std::string name)
    : temps_(std::move(temperatures)),
      values_(std::move(values)),
      name_(std::move(name)) {
  if (temps_.size() < 2) {
    throw std::invalid_argument("property curve needs at least two samples");
  }
  if (temps_.size() != values_.size()) {
    throw std::invalid_argument(
        "property curve temperature/value lengths differ");
  }
  for (std::size_t i = 1; i < temps_.size(); ++i) {
    if (!(temps_[i] > temps_[i - 1])) {
      throw std::invalid_argument(
          "property curve temperatures must be strictly increasing");
    }
  }
}

double PiecewiseCurve::operator()(double temperature_k) const {
  if (temps_.empty()) {
    throw std::logic_error("evaluating an empty property curve");
  }
  if (temperature_k < temps_.front() || temperature_k > temps_.back()) {
    std::ostringstream msg;
    msg << "temperature " << temperature_k << " K outside curve";
    if (!name_.empty()) msg << " '" << name_ << "'";
    msg << " span [" << temps_.front() << ", " << temps_.back() << "] K";
    throw std::out_of_range(msg.str());
  }
  auto it = std::lower_bound(temps_.begin(), temps_.end(), temperature_k);
  std::size_t hi = static_cast<std::size_t>(it - temps_.begin());
  if (hi == 0) return values_.front();
  if (temps_[hi] == temperature_k) return values_[hi];
  std::size_t lo = hi - 1;
  double frac = (temperature_k - temps_[lo]) / (temps_[hi] - temps_[lo]);
  return values_[lo] + frac * (values_[hi] - values_[lo]);
}

double interpolate_property(const PiecewiseCurve& curve, double temperature_k) {
  return curve(temperature_k);
}

}  // namespace gapcap
