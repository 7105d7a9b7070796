#pragma once

#include <span>
#include <string>
#include <vector>

#include "rssd/compensator.hpp"
#include "rssd/eigassign.hpp"
#include "rssd/lti.hpp"
#include "rssd/vgap.hpp"

namespace rssd {

// Search box for the four coefficients of one section.
struct SectionBox {
  Interval a, b, c, d;
};

struct ScpConstraints {
  std::vector<SectionBox> input_boxes;   // one per plant input
  std::vector<SectionBox> output_boxes;  // one per plant output
  // sigma_min of every augmented plant at DC must exceed this (dB).
  double dc_floor_db = 6.0;
  // sigma_min must stay above 0 dB on [band_lo, band_hi].
  double band_lo = 1e-3;
  double band_hi = 15.28;
  // Optional per-plant upper band edge; empty means the shared band_hi.
  std::vector<double> per_plant_band_hi;
  // Relative distance below which a compensator root cancels a plant root.
  double cancellation_tol = 1e-4;
};

void validate_constraints(const ScpConstraints& constraints, int inputs,
                          int outputs);

// Checks the bank invariants: finite coefficients, d != 0, proper sections
// and stable poles. Throws InvalidSection, ImproperSection or UnstableSection.
void validate_bank(const CompensatorBank& bank);

// Genes are (a, b, c, d) per section. Throws OutOfBox when a gene leaves its
// box, otherwise the bank invariants apply as in validate_bank. A section
// with c == 0 and a == 0 decodes to a static gain b/d.
CompensatorBank decode_bank(std::span<const double> genes, BankSide side,
                            std::span<const SectionBox> boxes);

std::vector<double> encode_bank(const CompensatorBank& bank);

// Finite transmission zeros from the system pencil.
std::vector<Complex> transmission_zeros(const StateSpacePlant& plant);

struct PlantRoots {
  std::vector<std::vector<Complex>> poles;
  std::vector<std::vector<Complex>> zeros;
};

PlantRoots plant_roots(const PlantSet& set);

struct ConstraintReport {
  bool pass = true;
  int violations = 0;
  std::vector<std::string> reasons;
};

ConstraintReport check_constraints(const CompensatorBank& w_in,
                                   const CompensatorBank& w_out,
                                   const PlantSet& set,
                                   const ScpConstraints& constraints,
                                   const FrequencyGrid& grid);
ConstraintReport check_constraints(const CompensatorBank& w_in,
                                   const CompensatorBank& w_out,
                                   const PlantSet& set, const PlantRoots& roots,
                                   const ScpConstraints& constraints,
                                   const FrequencyGrid& grid);

PlantSet augment_set(const CompensatorBank& w_out, const PlantSet& set,
                     const CompensatorBank& w_in);

struct J1Result {
  double j1 = 0.0;
  int cp_index = 0;
  StateSpacePlant augmented_cp;
  Matrix gaps;
};

// Maximum ν-gap of the central plant of the augmented set.
J1Result j1_fitness(const CompensatorBank& w_in, const CompensatorBank& w_out,
                    const PlantSet& set, const FrequencyGrid& grid,
                    const VgapOptions& options = {});

}  // namespace rssd
