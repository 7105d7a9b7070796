#pragma once

#include <vector>

#include "rssd/lti.hpp"

namespace rssd {

// Static output feedback u = K y (positive-feedback convention, loop
// operator (I - K P)^-1).
struct ClosedLoop {
  StateSpacePlant plant;
  Matrix gain;
  // [P; I] (I - K P)^-1 [-I K], inputs (m + r), outputs (r + m).
  StateSpacePlant realization;
  Matrix state_matrix;
  bool stable = false;
};

// A + B (I - K D)^-1 K C. Throws IllPosedLoop when I - K D is singular.
Matrix closed_loop_matrix(const StateSpacePlant& plant, const Matrix& gain);
bool is_internally_stable(const StateSpacePlant& plant, const Matrix& gain);
ClosedLoop close_loop(const StateSpacePlant& plant, const Matrix& gain);

// Four-block operator evaluated directly from a frequency-response sample.
CMatrix four_block(const CMatrix& p, const Matrix& gain);

struct NormResult {
  double norm = 0.0;
  double omega = 0.0;
};

// Peak of sigma_max(sys(jw)) including the high-frequency limit. Returns
// +infinity (at the offending frequency) for systems with poles on the
// imaginary axis.
NormResult linf_norm(const StateSpacePlant& sys, const FrequencyGrid& grid);

// Generalized stability margin b_{P,K}: 0 unless the loop is internally
// stable, otherwise the inverse L-infinity norm of the four-block operator.
double gsm(const StateSpacePlant& plant, const Matrix& gain,
           const FrequencyGrid& grid);

struct SensitivityCurves {
  std::vector<double> omega;
  std::vector<double> so_max, so_min;    // (I - P K)^-1
  std::vector<double> si_max, si_min;    // (I - K P)^-1
  std::vector<double> kso_max, kso_min;  // K (I - P K)^-1
};

SensitivityCurves sensitivity_curves(const StateSpacePlant& plant,
                                     const Matrix& gain,
                                     const FrequencyGrid& grid);

struct UncertaintyBounds {
  std::vector<double> omega;
  // 1 / sigma_max(P K (I - P K)^-1)
  std::vector<double> output_multiplicative;
  // 1 / sigma_max((I - K P)^-1)
  std::vector<double> inverse_input_multiplicative;
  double min_output = 0.0;
  double min_output_omega = 0.0;
  double min_inverse_input = 0.0;
  double min_inverse_input_omega = 0.0;
};

UncertaintyBounds uncertainty_bounds(const StateSpacePlant& plant,
                                     const Matrix& gain,
                                     const FrequencyGrid& grid);

struct MarginReport {
  double gsm = 0.0;
  // Balanced (skew 0) disk margin; the smaller of the input and output
  // loop-break values.
  double disk_alpha = 0.0;
  double mdgm_db = 0.0;   // symmetric +/- gain margin
  double mdpm_deg = 0.0;  // symmetric +/- phase margin
  double alpha_input = 0.0;
  double alpha_output = 0.0;
  double omega_input = 0.0;
  double omega_output = 0.0;
  double worst_omega = 0.0;
  bool worst_at_input = true;
  double gsm_omega = 0.0;
  // K == 0: no feedback, the disk margin carries no information.
  bool degenerate = false;
};

double disk_gain_margin_db(double alpha);
double disk_phase_margin_deg(double alpha);

MarginReport disk_margin(const StateSpacePlant& plant, const Matrix& gain,
                         const FrequencyGrid& grid);

}  // namespace rssd
