#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rssd/compensator.hpp"
#include "rssd/lti.hpp"

namespace rssd {

enum class SignalKind { kZero, kStep, kDoublet, kSine };

// Scalar test signal. A doublet is +magnitude on [start, start + width) and
// -magnitude on [start + width, start + 2 width).
struct Signal {
  SignalKind kind = SignalKind::kZero;
  double magnitude = 0.0;
  double start = 0.0;
  double width = 0.0;
  double frequency = 0.0;  // rad/s, sine only

  double value(double t) const;
};

// Output-multiplicative perturbation y -> (I + delta * scale * G) y applied
// to one channel, or to all channels when channel < 0.
struct WeightInjection {
  Section weight;
  int channel = -1;
  double scale = 1.0;
  double delta = 1.0;
};

struct Scenario {
  std::string name;
  // One signal per output channel; empty means zero on every channel.
  std::vector<Signal> reference;
  std::vector<Signal> disturbance;
  std::optional<WeightInjection> weight;
  double dt = 1e-3;
  double duration = 10.0;
  // Either the plant states only or the full closed-loop state.
  std::optional<Vector> initial_state;
};

void validate_scenario(const Scenario& scenario, int outputs);

struct TraceSet {
  std::vector<double> time;
  Matrix reference;  // samples x r
  Matrix output;     // samples x r, measured output fed back
  Matrix error;      // samples x r, reference - output
  Matrix input;      // samples x m, plant input after W_in
  Matrix state;      // samples x closed-loop states
  bool diverged = false;
  double divergence_time = 0.0;
};

// Closed loop u = K (z - r) around W_out P W_in (positive-feedback form),
// where z is the measured, possibly perturbed and disturbed, output.
// Integrated with fixed-step RK4; stops at the first sample whose state
// magnitude exceeds 1e9.
TraceSet simulate(const StateSpacePlant& plant, const Matrix& gain,
                  const CompensatorBank& w_in, const CompensatorBank& w_out,
                  const Scenario& scenario);

// State matrix of the simulated loop, including weight states.
Matrix simulation_matrix(const StateSpacePlant& plant, const Matrix& gain,
                         const CompensatorBank& w_in,
                         const CompensatorBank& w_out,
                         const std::optional<WeightInjection>& weight);

struct TrackingSpec {
  std::vector<int> channels;
  std::vector<double> band;         // per channel, max |error| after settle
  double settle_time = 0.0;
  std::vector<double> rms_ceiling;  // per channel
  double rms_start = 0.0;
  double rms_end = std::numeric_limits<double>::infinity();
};

struct ChannelMetrics {
  int channel = 0;
  double max_error = 0.0;
  double rms = 0.0;
  bool band_pass = true;
  bool rms_pass = true;
};

struct TrackingReport {
  std::vector<ChannelMetrics> channels;
  bool pass = true;
};

// Throws DivergentTrace for diverged or non-finite traces.
TrackingReport tracking_metrics(const TraceSet& traces, const TrackingSpec& spec);

// |G(jw)| on every grid frequency.
std::vector<double> weight_gain_curve(const Section& g, const FrequencyGrid& grid);

}  // namespace rssd
