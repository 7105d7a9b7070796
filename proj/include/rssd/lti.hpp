#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rssd/compensator.hpp"

namespace rssd {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Continuous-time LTI plant x' = Ax + Bu, y = Cx + Du. Immutable once built.
class StateSpacePlant {
 public:
  StateSpacePlant(Matrix a, Matrix b, Matrix c, Matrix d,
                  std::string label = {});

  // Zero-state system y = D u.
  static StateSpacePlant static_gain(Matrix d, std::string label = {});

  int states() const { return static_cast<int>(a_.rows()); }
  int inputs() const { return static_cast<int>(b_.cols()); }
  int outputs() const { return static_cast<int>(c_.rows()); }

  const Matrix& a() const { return a_; }
  const Matrix& b() const { return b_; }
  const Matrix& c() const { return c_; }
  const Matrix& d() const { return d_; }
  const std::string& label() const { return label_; }

  StateSpacePlant relabeled(std::string label) const;

 private:
  Matrix a_, b_, c_, d_;
  std::string label_;
};

// Ordered, nonempty set of plants sharing input/output dimensions.
class PlantSet {
 public:
  explicit PlantSet(std::vector<StateSpacePlant> plants);

  int size() const { return static_cast<int>(plants_.size()); }
  int inputs() const { return plants_.front().inputs(); }
  int outputs() const { return plants_.front().outputs(); }
  const StateSpacePlant& operator[](int i) const { return plants_.at(i); }
  const std::vector<StateSpacePlant>& plants() const { return plants_; }
  auto begin() const { return plants_.begin(); }
  auto end() const { return plants_.end(); }

 private:
  std::vector<StateSpacePlant> plants_;
};

// Strictly increasing set of non-negative frequencies (rad/s) with the
// settings used when refining local peaks between grid points.
class FrequencyGrid {
 public:
  explicit FrequencyGrid(std::vector<double> points, int refine_depth = 40,
                         double rel_tol = 1e-4);

  static FrequencyGrid logspace(double lo, double hi, int count,
                                int refine_depth = 40, double rel_tol = 1e-4);
  // 400 log-spaced points over [1e-3, 1e5] rad/s.
  static FrequencyGrid standard();

  const std::vector<double>& points() const { return points_; }
  int refine_depth() const { return refine_depth_; }
  double rel_tol() const { return rel_tol_; }
  double lo() const { return points_.front(); }
  double hi() const { return points_.back(); }

 private:
  std::vector<double> points_;
  int refine_depth_;
  double rel_tol_;
};

struct EigenInfo {
  Complex value;
  double damping = 1.0;
  double natural_frequency = 0.0;
  // Eigenvalue at the origin: damping is reported as 1 by convention.
  bool marginal = false;
};

EigenInfo describe_eigenvalue(Complex value);

// |Re(lambda)| <= 1e-9 * max(1, |lambda|).
bool on_imaginary_axis(Complex value);

CVector eigenvalues(const Matrix& a);

// Eigenvalues sorted by real part with conjugate pairs adjacent (+imag first).
std::vector<EigenInfo> spectrum(const Matrix& a);
std::vector<EigenInfo> spectrum(const StateSpacePlant& plant);

// C (sI - A)^-1 B + D at an arbitrary complex point.
CMatrix evaluate(const StateSpacePlant& plant, Complex s);
CMatrix freq_response(const StateSpacePlant& plant, double omega);

// Feeds the output of `first` into `second`. States are [first; second].
StateSpacePlant series(const StateSpacePlant& first,
                       const StateSpacePlant& second);

// Block-diagonal concatenation (independent channels).
StateSpacePlant append(const StateSpacePlant& lhs, const StateSpacePlant& rhs);

// Diagonal realization of a compensator bank.
StateSpacePlant realize_bank(const CompensatorBank& bank);

// W_out * P * W_in with states ordered [plant; w_in; w_out].
StateSpacePlant augment_plant(const CompensatorBank& w_out,
                              const StateSpacePlant& plant,
                              const CompensatorBank& w_in);

double max_singular_value(const CMatrix& m);
double min_singular_value(const CMatrix& m);

}  // namespace rssd
