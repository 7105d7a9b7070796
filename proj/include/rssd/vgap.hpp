#pragma once

#include <optional>
#include <vector>

#include "rssd/lti.hpp"

namespace rssd {

struct PoleCounts {
  int rhp = 0;        // open right-half-plane poles
  int imaginary = 0;  // poles on the imaginary axis
};

enum class PoleCountMode {
  // Count eigenvalues of A directly (no minimality reduction).
  kStateMatrix,
  // Skip eigenvalues that fail the PBH controllability or observability
  // rank test, i.e. treat the realization as if it were minimal.
  kAssumeMinimal,
};

PoleCounts pole_counts(const StateSpacePlant& plant,
                       PoleCountMode mode = PoleCountMode::kStateMatrix);

// Winding number of det(I + P2~(s) P1(s)), P2~(s) = P2(-s)^T, as s runs the
// boundary of the right half plane (imaginary axis indented to the right
// around imaginary-axis poles of either plant, closed at infinity). The sign
// is that of the encirclement count which, added to eta(P1) - eta(P2) -
// eta0(P2), must vanish for the plants to be at ν-gap distance below one.
int winding_number_det(const StateSpacePlant& p1, const StateSpacePlant& p2,
                       const FrequencyGrid& grid);

// Pointwise chordal distance sigma_max(Psi(P1, P2)) with
// Psi = (I + P2 P2^H)^{-1/2} (P1 - P2) (I + P1^H P1)^{-1/2}.
double chordal_distance(const CMatrix& p1, const CMatrix& p2);

struct VgapResult {
  double value = 1.0;
  bool condition_met = false;
  int wno = 0;
  std::optional<double> peak_frequency;
};

struct VgapOptions {
  PoleCountMode pole_count_mode = PoleCountMode::kStateMatrix;
};

VgapResult nu_gap(const StateSpacePlant& p1, const StateSpacePlant& p2,
                  const FrequencyGrid& grid, const VgapOptions& options = {});

// Symmetric N x N matrix of pairwise ν-gaps with a zero diagonal.
Matrix gap_matrix(const PlantSet& set, const FrequencyGrid& grid,
                  const VgapOptions& options = {});

double max_vgap(int index, const PlantSet& set, const FrequencyGrid& grid,
                const VgapOptions& options = {});

struct CentralPlantResult {
  int index = 0;
  double epsilon = 0.0;
  Matrix gap_matrix;
  std::vector<double> max_gaps;
};

// Plant with the smallest maximum ν-gap to the rest of the set; ties go to
// the lowest index.
CentralPlantResult central_plant(const PlantSet& set, const FrequencyGrid& grid,
                                 const VgapOptions& options = {});
CentralPlantResult central_plant_from_gaps(Matrix gaps);

}  // namespace rssd
