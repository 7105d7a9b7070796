#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rssd/lti.hpp"

namespace rssd {

struct Peak {
  double value = 0.0;
  // +infinity when the peak is the high-frequency limit.
  double omega = 0.0;
};

// Scalar frequency function. Returning NaN marks a point that cannot be
// evaluated (e.g. a pole sitting exactly on the sample); it is skipped.
using FrequencyFunction = std::function<double(double)>;

// Maximum of `f` over the grid, any `extra` frequencies, and an optional
// value at omega = infinity. Every local maximum among the samples is
// refined by golden-section search between its neighbours (in log-frequency
// where the bracket is positive) until the bracket is narrower than the
// grid's relative tolerance or the refinement depth is exhausted.
Peak find_peak(const FrequencyFunction& f, const FrequencyGrid& grid,
               std::span<const double> extra = {},
               std::optional<double> value_at_infinity = std::nullopt);

// Frequencies worth sampling explicitly for a plant: the modulus and the
// imaginary part of every eigenvalue with a positive natural frequency.
std::vector<double> characteristic_frequencies(const StateSpacePlant& plant);

}  // namespace rssd
