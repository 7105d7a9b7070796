#pragma once

#include <optional>
#include <vector>

#include "rssd/lti.hpp"

namespace rssd {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return x >= lo && x <= hi; }
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

// Box on one eigenvector entry. For complex eigenvalues both parts are
// constrained; for real eigenvalues `im` is ignored.
struct EntryConstraint {
  int state = 0;
  Interval re;
  Interval im;
};

// One desired closed-loop eigenvalue, or a conjugate pair represented by its
// +imaginary member. A pair occupies two of the r assignment slots.
struct EigSlot {
  Complex value;
  bool complex_pair = false;
  // Search boxes for the real part and (pairs only) the damped frequency.
  Interval re_box;
  Interval im_box;
  std::vector<EntryConstraint> entries;

  int width() const { return complex_pair ? 2 : 1; }
};

struct EigTarget {
  std::vector<EigSlot> slots;
  double zeta_min = 0.3;
  std::optional<double> sigma_max;

  int assigned_count() const {
    int count = 0;
    for (const auto& s : slots) count += s.width();
    return count;
  }
};

// Throws InvalidArgument unless the target is self-consistent for a plant
// with `states` states and `outputs` outputs.
void validate_target(const EigTarget& target, int states, int outputs);

// Columns span {[R; W] : [A - lambda I, B][R; W] = 0}. For complex lambda
// the rows are [R_re; R_im; W_re; W_im] of the real-augmented system.
struct SubspaceBasis {
  Complex eigenvalue;
  bool complex_pair = false;
  int states = 0;
  int inputs = 0;
  Matrix basis;
};

SubspaceBasis allowable_subspace(const Matrix& a, const Matrix& b,
                                 Complex lambda);

struct EigenvectorSet {
  Matrix w;  // inputs x r
  Matrix r;  // states x r
  // Achieved value of every constrained entry, per slot.
  std::vector<std::vector<Complex>> achieved;
};

// Picks, per slot, the subspace member whose constrained entries best match
// `entry_values` in least squares; free directions fall back to the default
// unit-norm normalization. Throws BoundViolation when an achieved entry
// leaves its box by more than 1% of the box width.
EigenvectorSet select_vectors(
    const std::vector<SubspaceBasis>& subspaces, const EigTarget& target,
    const std::vector<std::vector<Complex>>& entry_values);

constexpr double kDefaultKappaLimit = 1e5;

double condition_number(const Matrix& m);

struct GainResult {
  Matrix gain;
  double kappa = 0.0;
};

// K = W (C R)^-1, guarded by kappa(C R) < kappa_limit (IllConditioned).
GainResult compute_gain(const Matrix& w, const Matrix& r, const Matrix& c,
                        double kappa_limit = kDefaultKappaLimit);

bool in_region_s1(Complex value, const EigTarget& target);

struct S1Check {
  bool pass = true;
  std::vector<Complex> offending;
};

S1Check check_s1(const std::vector<EigenInfo>& spectrum,
                 const EigTarget& target);

// Subspaces for every slot of `target` using `values` as the desired
// eigenvalues (one per slot, +imaginary member for pairs).
std::vector<SubspaceBasis> slot_subspaces(const StateSpacePlant& plant,
                                          const std::vector<Complex>& values);

}  // namespace rssd
