#include "rssd/sim.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "rssd/error.hpp"

namespace rssd {
namespace {

constexpr double kDivergence = 1e9;

// Closed loop x' = A x + B [r; d], with the algebraic loop through the
// feedthrough terms solved once.
struct LoopModel {
  Matrix a, b;
  Matrix u_x, u_w;  // u = u_x x + u_w w  (input of the augmented plant)
  Matrix z_x, z_w;  // measured output
  Matrix p_x, p_w;  // plant input after W_in
};

LoopModel build_loop(const StateSpacePlant& plant, const Matrix& gain,
                     const CompensatorBank& w_in, const CompensatorBank& w_out,
                     const std::optional<WeightInjection>& weight) {
  const StateSpacePlant aug = augment_plant(w_out, plant, w_in);
  const int n = aug.states(), m = aug.inputs(), r = aug.outputs();
  if (gain.rows() != m || gain.cols() != r) {
    throw Error(ErrorCode::kDimensionMismatch, "gain dimensions do not match the plant");
  }

  // Weight states: one per perturbed channel for a dynamic section.
  std::vector<int> channels;
  if (weight) {
    if (weight->channel >= r) {
      throw Error(ErrorCode::kDimensionMismatch, "weight channel out of range");
    }
    for (int i = 0; i < r; ++i) {
      if (weight->channel < 0 || weight->channel == i) channels.push_back(i);
    }
  }
  const bool dynamic = weight && !weight->weight.is_static;
  const int q = dynamic ? static_cast<int>(channels.size()) : 0;
  Matrix ag = Matrix::Zero(q, q), bg = Matrix::Zero(q, r);
  Matrix cg = Matrix::Zero(r, q);
  Matrix mix = Matrix::Identity(r, r);  // z = mix * y~ + cg * xg + d
  if (weight) {
    const Section& g = weight->weight;
    const double k = weight->delta * weight->scale;
    for (std::size_t j = 0; j < channels.size(); ++j) {
      const int ch = channels[j];
      if (dynamic) {
        const double pole = -g.d / g.c;
        ag(j, j) = pole;
        bg(j, ch) = 1.0;
        cg(ch, j) = k * (g.b - g.a * g.d / g.c) / g.c;
        mix(ch, ch) += k * g.a / g.c;
      } else {
        mix(ch, ch) += k * g.b / g.d;
      }
    }
  }

  // u = K (mix (C x + D u) + cg xg + d - r)
  const Matrix lhs = Matrix::Identity(m, m) - gain * mix * aug.d();
  Eigen::FullPivLU<Matrix> lu(lhs);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kIllPosedLoop, "I - K D is singular in simulation");
  }
  const Matrix l = lu.inverse() * gain;
  const int total = n + q;
  Matrix u_x(m, total);
  u_x << l * mix * aug.c(), l * cg;
  Matrix u_w(m, 2 * r);
  u_w << -l, l;

  Matrix y_x(r, total), y_w(r, 2 * r);
  y_x << aug.c(), Matrix::Zero(r, q);
  y_x += aug.d() * u_x;
  y_w = aug.d() * u_w;

  LoopModel model;
  model.a.resize(total, total);
  model.a << aug.a(), Matrix::Zero(n, q), Matrix::Zero(q, n), ag;
  model.a.topRows(n) += aug.b() * u_x;
  model.a.bottomRows(q) += bg * y_x;
  model.b.resize(total, 2 * r);
  model.b << aug.b() * u_w, bg * y_w;
  model.u_x = u_x;
  model.u_w = u_w;
  model.z_x = mix * y_x;
  model.z_x.rightCols(q) += cg;
  model.z_w = mix * y_w;
  model.z_w.rightCols(r) += Matrix::Identity(r, r);

  // Plant input is the W_in output: states [plant; w_in; w_out].
  const StateSpacePlant win = realize_bank(w_in);
  const int np = plant.states(), ni = win.states();
  Matrix sel_x = Matrix::Zero(ni, total);
  sel_x.block(0, np, ni, ni).setIdentity();
  model.p_x = win.c() * sel_x + win.d() * u_x;
  model.p_w = win.d() * u_w;
  return model;
}

Vector signals(const Scenario& s, int r, double t) {
  Vector w = Vector::Zero(2 * r);
  for (int i = 0; i < static_cast<int>(s.reference.size()); ++i) {
    w(i) = s.reference[i].value(t);
  }
  for (int i = 0; i < static_cast<int>(s.disturbance.size()); ++i) {
    w(r + i) = s.disturbance[i].value(t);
  }
  return w;
}

void validate_signal(const Signal& sig, double dt) {
  if (!std::isfinite(sig.magnitude) || !std::isfinite(sig.start)) {
    throw Error(ErrorCode::kInvalidArgument, "signal parameters must be finite");
  }
  if (sig.kind == SignalKind::kDoublet && !(sig.width > dt)) {
    throw Error(ErrorCode::kInvalidArgument, "doublet pulse width must exceed dt");
  }
}

}  // namespace

double Signal::value(double t) const {
  switch (kind) {
    case SignalKind::kZero:
      return 0.0;
    case SignalKind::kStep:
      return t >= start ? magnitude : 0.0;
    case SignalKind::kDoublet:
      if (t >= start && t < start + width) return magnitude;
      if (t >= start + width && t < start + 2.0 * width) return -magnitude;
      return 0.0;
    case SignalKind::kSine:
      return t >= start ? magnitude * std::sin(frequency * (t - start)) : 0.0;
  }
  return 0.0;
}

void validate_scenario(const Scenario& s, int outputs) {
  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) {
    throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  }
  if (!(s.duration >= 10.0 * s.dt) || !std::isfinite(s.duration)) {
    throw Error(ErrorCode::kInvalidArgument, "duration must be at least 10 dt");
  }
  for (const auto* list : {&s.reference, &s.disturbance}) {
    if (!list->empty() && static_cast<int>(list->size()) != outputs) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "scenario '" + s.name + "' needs one signal per output (" +
                      std::to_string(outputs) + ")");
    }
    for (const auto& sig : *list) validate_signal(sig, s.dt);
  }
  if (s.weight) {
    const Section& g = s.weight->weight;
    if (g.d == 0.0 || (!g.is_static && (g.c == 0.0 || !(-g.d / g.c < 0.0)))) {
      throw Error(ErrorCode::kInvalidSection, "uncertainty weight must be proper and stable");
    }
  }
}

Matrix simulation_matrix(const StateSpacePlant& plant, const Matrix& gain,
                         const CompensatorBank& w_in,
                         const CompensatorBank& w_out,
                         const std::optional<WeightInjection>& weight) {
  return build_loop(plant, gain, w_in, w_out, weight).a;
}

TraceSet simulate(const StateSpacePlant& plant, const Matrix& gain,
                  const CompensatorBank& w_in, const CompensatorBank& w_out,
                  const Scenario& scenario) {
  const int r = plant.outputs(), m = plant.inputs();
  validate_scenario(scenario, r);
  const LoopModel model = build_loop(plant, gain, w_in, w_out, scenario.weight);
  const int total = static_cast<int>(model.a.rows());

  Vector x = Vector::Zero(total);
  if (scenario.initial_state) {
    const Vector& x0 = *scenario.initial_state;
    if (x0.size() != plant.states() && x0.size() != total) {
      std::ostringstream os;
      os << "initial state has " << x0.size() << " entries, expected "
         << plant.states() << " or " << total;
      throw Error(ErrorCode::kDimensionMismatch, os.str());
    }
    x.head(x0.size()) = x0;
  }

  const double dt = scenario.dt;
  const long steps = std::lround(scenario.duration / dt);
  TraceSet tr;
  tr.reference.resize(steps + 1, r);
  tr.output.resize(steps + 1, r);
  tr.error.resize(steps + 1, r);
  tr.input.resize(steps + 1, m);
  tr.state.resize(steps + 1, total);

  auto deriv = [&](const Vector& state, double t) {
    return Vector(model.a * state + model.b * signals(scenario, r, t));
  };
  long k = 0;
  for (;; ++k) {
    const double t = k * dt;
    const Vector w = signals(scenario, r, t);
    const Vector ref = w.head(r);
    const Vector z = model.z_x * x + model.z_w * w;
    tr.time.push_back(t);
    tr.reference.row(k) = ref.transpose();
    tr.output.row(k) = z.transpose();
    tr.error.row(k) = (ref - z).transpose();
    tr.input.row(k) = (model.p_x * x + model.p_w * w).transpose();
    tr.state.row(k) = x.transpose();
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergence) {
      tr.diverged = true;
      tr.divergence_time = t;
      break;
    }
    if (k == steps) break;
    const Vector k1 = deriv(x, t);
    const Vector k2 = deriv(x + 0.5 * dt * k1, t + 0.5 * dt);
    const Vector k3 = deriv(x + 0.5 * dt * k2, t + 0.5 * dt);
    const Vector k4 = deriv(x + dt * k3, t + dt);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const long rows = k + 1;
  tr.reference.conservativeResize(rows, r);
  tr.output.conservativeResize(rows, r);
  tr.error.conservativeResize(rows, r);
  tr.input.conservativeResize(rows, m);
  tr.state.conservativeResize(rows, total);
  return tr;
}

TrackingReport tracking_metrics(const TraceSet& traces, const TrackingSpec& spec) {
  if (traces.diverged) {
    std::ostringstream os;
    os << "trace diverged at t = " << traces.divergence_time << " s";
    throw Error(ErrorCode::kDivergentTrace, os.str());
  }
  if (!traces.error.allFinite()) {
    throw Error(ErrorCode::kDivergentTrace, "trace contains non-finite values");
  }
  if ((!spec.band.empty() && spec.band.size() != spec.channels.size()) ||
      (!spec.rms_ceiling.empty() &&
       spec.rms_ceiling.size() != spec.channels.size())) {
    throw Error(ErrorCode::kInvalidArgument,
                "tracking bands and RMS ceilings need one value per channel");
  }
  TrackingReport report;
  for (std::size_t c = 0; c < spec.channels.size(); ++c) {
    const int ch = spec.channels[c];
    if (ch < 0 || ch >= traces.error.cols()) {
      throw Error(ErrorCode::kInvalidArgument, "tracking channel out of range");
    }
    ChannelMetrics mtr;
    mtr.channel = ch;
    double sum = 0.0;
    long count = 0;
    for (std::size_t i = 0; i < traces.time.size(); ++i) {
      const double t = traces.time[i];
      const double e = traces.error(i, ch);
      if (t >= spec.settle_time) mtr.max_error = std::max(mtr.max_error, std::abs(e));
      if (t >= spec.rms_start && t <= spec.rms_end) {
        sum += e * e;
        ++count;
      }
    }
    mtr.rms = count > 0 ? std::sqrt(sum / count) : 0.0;
    if (!spec.band.empty()) mtr.band_pass = mtr.max_error <= spec.band[c];
    if (!spec.rms_ceiling.empty()) mtr.rms_pass = mtr.rms <= spec.rms_ceiling[c];
    report.pass = report.pass && mtr.band_pass && mtr.rms_pass;
    report.channels.push_back(mtr);
  }
  return report;
}

std::vector<double> weight_gain_curve(const Section& g, const FrequencyGrid& grid) {
  std::vector<double> out;
  out.reserve(grid.points().size());
  for (double w : grid.points()) out.push_back(std::abs(g.evaluate({0.0, w})));
  return out;
}

}  // namespace rssd
