#include "rssd/margins.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/LU>

#include "rssd/error.hpp"
#include "rssd/sweep.hpp"

namespace rssd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_gain_dims(const StateSpacePlant& plant, const Matrix& gain) {
  if (gain.rows() != plant.inputs() || gain.cols() != plant.outputs()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "gain is " + std::to_string(gain.rows()) + "x" +
                    std::to_string(gain.cols()) + ", plant '" +
                    plant.label() + "' needs " +
                    std::to_string(plant.inputs()) + "x" +
                    std::to_string(plant.outputs()));
  }
}

Matrix loop_inverse(const StateSpacePlant& plant, const Matrix& gain) {
  const int m = plant.inputs();
  const Matrix lhs = Matrix::Identity(m, m) - gain * plant.d();
  Eigen::FullPivLU<Matrix> lu(lhs);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kIllPosedLoop, "I - K D is singular");
  }
  return lu.inverse();
}

// Frequency response with a tiny nudge when the sample lands on a pole.
CMatrix response_near(const StateSpacePlant& plant, double omega) {
  try {
    return freq_response(plant, omega);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingularAtFrequency) throw;
    return freq_response(plant, omega * (1.0 + 1e-9) + 1e-12);
  }
}

CMatrix inverse(const CMatrix& m) { return m.partialPivLu().inverse(); }

void require_stable(const StateSpacePlant& plant, const Matrix& gain) {
  if (!is_internally_stable(plant, gain)) {
    throw Error(ErrorCode::kUnstableLoop,
                "closed loop of plant '" + plant.label() + "' is unstable");
  }
}

std::vector<double> loop_frequencies(const StateSpacePlant& plant,
                                     const Matrix& gain) {
  std::vector<double> extra{0.0};
  auto add = [&](const Matrix& a) {
    for (const auto& info : spectrum(a)) {
      if (info.natural_frequency > 0.0) extra.push_back(info.natural_frequency);
      if (info.value.imag() > 0.0) extra.push_back(info.value.imag());
    }
  };
  add(plant.a());
  add(closed_loop_matrix(plant, gain));
  return extra;
}

}  // namespace

Matrix closed_loop_matrix(const StateSpacePlant& plant, const Matrix& gain) {
  check_gain_dims(plant, gain);
  const Matrix e = loop_inverse(plant, gain);
  return plant.a() + plant.b() * e * gain * plant.c();
}

bool is_internally_stable(const StateSpacePlant& plant, const Matrix& gain) {
  const CVector ev = eigenvalues(closed_loop_matrix(plant, gain));
  for (int i = 0; i < ev.size(); ++i) {
    if (!(ev(i).real() < 0.0) || on_imaginary_axis(ev(i))) return false;
  }
  return true;
}

ClosedLoop close_loop(const StateSpacePlant& plant, const Matrix& gain) {
  check_gain_dims(plant, gain);
  const int m = plant.inputs(), r = plant.outputs();
  const Matrix e = loop_inverse(plant, gain);
  const Matrix ekc = e * gain * plant.c();
  Matrix w_to_u(m, m + r);
  w_to_u << -e, e * gain;

  Matrix a = plant.a() + plant.b() * ekc;
  Matrix b = plant.b() * w_to_u;
  Matrix c(r + m, plant.states());
  c << plant.c() + plant.d() * ekc, ekc;
  Matrix d(r + m, m + r);
  d << plant.d() * w_to_u, w_to_u;

  ClosedLoop loop{plant, gain,
                  StateSpacePlant(a, std::move(b), std::move(c), std::move(d),
                                  plant.label() + ":4block"),
                  a, false};
  loop.stable = is_internally_stable(plant, gain);
  return loop;
}

CMatrix four_block(const CMatrix& p, const Matrix& gain) {
  const auto r = p.rows(), m = p.cols();
  const CMatrix k = gain.cast<Complex>();
  const CMatrix loop = inverse(CMatrix::Identity(m, m) - k * p);
  CMatrix stacked(r + m, m);
  stacked << p * loop, loop;
  CMatrix out(r + m, m + r);
  out << -stacked, stacked * k;
  return out;
}

NormResult linf_norm(const StateSpacePlant& sys, const FrequencyGrid& grid) {
  const CVector ev = eigenvalues(sys.a());
  for (int i = 0; i < ev.size(); ++i) {
    if (on_imaginary_axis(ev(i))) return {kInf, std::abs(ev(i).imag())};
  }
  auto sigma = [&](double omega) {
    return max_singular_value(freq_response(sys, omega));
  };
  std::vector<double> extra = characteristic_frequencies(sys);
  extra.push_back(0.0);
  const Peak peak = find_peak(sigma, grid, extra,
                              max_singular_value(sys.d().cast<Complex>()));
  return {peak.value, peak.omega};
}

double gsm(const StateSpacePlant& plant, const Matrix& gain,
           const FrequencyGrid& grid) {
  const ClosedLoop loop = close_loop(plant, gain);
  if (!loop.stable) return 0.0;
  const NormResult norm = linf_norm(loop.realization, grid);
  if (!(norm.norm > 0.0) || !std::isfinite(norm.norm)) return 0.0;
  return std::min(1.0, 1.0 / norm.norm);
}

SensitivityCurves sensitivity_curves(const StateSpacePlant& plant,
                                     const Matrix& gain,
                                     const FrequencyGrid& grid) {
  require_stable(plant, gain);
  const int m = plant.inputs(), r = plant.outputs();
  const CMatrix k = gain.cast<Complex>();
  SensitivityCurves out;
  for (double w : grid.points()) {
    const CMatrix p = response_near(plant, w);
    const CMatrix so = inverse(CMatrix::Identity(r, r) - p * k);
    const CMatrix si = inverse(CMatrix::Identity(m, m) - k * p);
    const CMatrix kso = k * so;
    out.omega.push_back(w);
    out.so_max.push_back(max_singular_value(so));
    out.so_min.push_back(min_singular_value(so));
    out.si_max.push_back(max_singular_value(si));
    out.si_min.push_back(min_singular_value(si));
    out.kso_max.push_back(max_singular_value(kso));
    out.kso_min.push_back(min_singular_value(kso));
  }
  return out;
}

UncertaintyBounds uncertainty_bounds(const StateSpacePlant& plant,
                                     const Matrix& gain,
                                     const FrequencyGrid& grid) {
  require_stable(plant, gain);
  const int m = plant.inputs(), r = plant.outputs();
  const CMatrix k = gain.cast<Complex>();
  UncertaintyBounds out;
  out.min_output = kInf;
  out.min_inverse_input = kInf;
  for (double w : grid.points()) {
    const CMatrix p = response_near(plant, w);
    const CMatrix so = inverse(CMatrix::Identity(r, r) - p * k);
    const CMatrix to = p * k * so;
    const CMatrix si = inverse(CMatrix::Identity(m, m) - k * p);
    const double t_peak = max_singular_value(to);
    const double out_bound = t_peak > 0.0 ? 1.0 / t_peak : kInf;
    const double in_bound = 1.0 / max_singular_value(si);
    out.omega.push_back(w);
    out.output_multiplicative.push_back(out_bound);
    out.inverse_input_multiplicative.push_back(in_bound);
    if (out_bound < out.min_output) {
      out.min_output = out_bound;
      out.min_output_omega = w;
    }
    if (in_bound < out.min_inverse_input) {
      out.min_inverse_input = in_bound;
      out.min_inverse_input_omega = w;
    }
  }
  return out;
}

double disk_gain_margin_db(double alpha) {
  if (alpha >= 2.0) return kInf;
  return 20.0 * std::log10((2.0 + alpha) / (2.0 - alpha));
}

double disk_phase_margin_deg(double alpha) {
  return 2.0 * std::atan(alpha / 2.0) * 180.0 / std::numbers::pi;
}

MarginReport disk_margin(const StateSpacePlant& plant, const Matrix& gain,
                         const FrequencyGrid& grid) {
  require_stable(plant, gain);
  const int m = plant.inputs(), r = plant.outputs();
  const CMatrix k = gain.cast<Complex>();
  const std::vector<double> extra = loop_frequencies(plant, gain);

  // (S - T) / 2 = S - I/2 with S the loop sensitivity at the break point.
  auto input_peak = [&](const CMatrix& p) {
    const CMatrix s = inverse(CMatrix::Identity(m, m) - k * p);
    return max_singular_value(s - 0.5 * CMatrix::Identity(m, m));
  };
  auto output_peak = [&](const CMatrix& p) {
    const CMatrix s = inverse(CMatrix::Identity(r, r) - p * k);
    return max_singular_value(s - 0.5 * CMatrix::Identity(r, r));
  };
  const CMatrix p_inf = plant.d().cast<Complex>();
  const Peak in = find_peak(
      [&](double w) { return input_peak(response_near(plant, w)); }, grid,
      extra, input_peak(p_inf));
  const Peak out = find_peak(
      [&](double w) { return output_peak(response_near(plant, w)); }, grid,
      extra, output_peak(p_inf));

  MarginReport report;
  report.alpha_input = in.value > 0.0 ? 1.0 / in.value : kInf;
  report.alpha_output = out.value > 0.0 ? 1.0 / out.value : kInf;
  report.omega_input = in.omega;
  report.omega_output = out.omega;
  report.worst_at_input = report.alpha_input <= report.alpha_output;
  report.disk_alpha = std::min(report.alpha_input, report.alpha_output);
  report.worst_omega = report.worst_at_input ? in.omega : out.omega;
  report.mdgm_db = disk_gain_margin_db(report.disk_alpha);
  report.mdpm_deg = disk_phase_margin_deg(report.disk_alpha);
  report.degenerate = gain.isZero(0.0);

  const ClosedLoop loop = close_loop(plant, gain);
  const NormResult norm = linf_norm(loop.realization, grid);
  report.gsm = std::min(1.0, 1.0 / norm.norm);
  report.gsm_omega = norm.omega;
  return report;
}

}  // namespace rssd
