#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rssd/compensator.hpp"
#include "rssd/eigassign.hpp"
#include "rssd/ga.hpp"
#include "rssd/lti.hpp"
#include "rssd/margins.hpp"
#include "rssd/scp.hpp"
#include "rssd/vgap.hpp"

namespace rssd {

// Penalty returned by the inner fitness for any rejected genome.
inline constexpr double kRssdPenalty = std::numeric_limits<double>::max();

// Gene layout of the eigenstructure search: per slot the real part (and the
// damped frequency for a pair), followed by every constrained entry's real
// part (and imaginary part for a pair).
std::vector<Interval> rssd_boxes(const EigTarget& target);

struct RssdGenome {
  std::vector<Complex> eigenvalues;  // one per slot, +imag member for pairs
  std::vector<std::vector<Complex>> entries;
};

RssdGenome decode_rssd(std::span<const double> genes, const EigTarget& target);
std::vector<double> encode_rssd(const RssdGenome& genome,
                                const EigTarget& target);

struct J2Result {
  double j2 = kRssdPenalty;
  std::optional<Matrix> gain;
  double kappa = 0.0;
  // Empty on success, otherwise the reason the genome was rejected.
  std::string failure;
};

// Eigenstructure assignment on the central plant followed by the four-block
// L-infinity norm. Every guard failure maps to kRssdPenalty.
J2Result j2_fitness(const StateSpacePlant& p_cp, const EigTarget& target,
                    const RssdGenome& genome, const FrequencyGrid& grid,
                    double kappa_limit = kDefaultKappaLimit);

// Gain that places the target for a plant with feedthrough: the assignment
// solves for Kh = (I - K D)^-1 K, then K = Kh (I + D Kh)^-1.
Matrix feedthrough_gain(const Matrix& assigned, const Matrix& d);

enum class TriggerMode {
  // Inner search fires during the fitness evaluation that beats the bound.
  kPerEvaluation,
  // Candidates are collected per generation and handled in population order.
  kPerGeneration,
};

struct NnRssdOptions {
  ScpConstraints constraints;
  EigTarget target;
  GaConfig scp;
  GaConfig rssd{.population = 50, .max_generations = 1000};
  FrequencyGrid grid = FrequencyGrid::standard();
  double kappa_limit = kDefaultKappaLimit;
  TriggerMode trigger = TriggerMode::kPerEvaluation;
  // Lower bound on the adaptive constraint so that b > J1bar stays
  // satisfiable for sets with zero spread.
  double j1_floor = 1e-3;
  VgapOptions vgap;
};

// Post-hoc re-verification of a reported gain.
struct LemmaCheck {
  bool assigned = false;      // desired eigenvalues present in the cp loop
  bool cp_in_s1 = false;      // whole cp closed-loop spectrum in S1
  bool margin = false;        // gsm(P_cp, K) > J1bar
  bool all_stable = false;    // every augmented plant stabilized
  bool kappa_ok = false;
  double max_assign_error = 0.0;
  double gsm_cp = 0.0;
  double kappa = 0.0;
  std::vector<bool> plant_stable;

  bool pass() const {
    return assigned && cp_in_s1 && margin && all_stable && kappa_ok;
  }
};

LemmaCheck verify_lemma(const PlantSet& augmented, int cp_index,
                        const Matrix& gain,
                        const std::vector<Complex>& assigned_values,
                        const EigTarget& target, double j1_bar, double kappa,
                        const FrequencyGrid& grid,
                        double kappa_limit = kDefaultKappaLimit);

struct RssdInvocation {
  int scp_evaluation = 0;  // 0-based index of the triggering evaluation
  double j1 = 0.0;
  int cp_index = 0;
  std::uint64_t seed = 0;
  int generations = 0;
  double best_j2 = kRssdPenalty;
  bool feasible = false;
};

struct PlantOutcome {
  std::string label;
  std::vector<EigenInfo> spectrum;
  bool stable = false;
  double gsm = 0.0;
};

struct SynthesisReport {
  bool feasible = false;
  std::uint64_t seed = 0;
  double initial_j1_bar = 0.0;
  // Every value that beat the adaptive constraint, in order.
  std::vector<double> j1_bar_history;
  double j1_bar = 0.0;
  double j2 = kRssdPenalty;
  int cp_index = -1;
  std::optional<Matrix> gain;
  CompensatorBank w_in;
  CompensatorBank w_out;
  std::vector<Complex> assigned_values;
  double kappa = 0.0;
  int scp_generations = 0;
  int scp_evaluations = 0;
  std::vector<RssdInvocation> invocations;
  std::optional<LemmaCheck> verification;
  std::vector<PlantOutcome> plants;
};

void validate_options(const NnRssdOptions& options, const PlantSet& set);

SynthesisReport run_nn_rssd(const PlantSet& set, const NnRssdOptions& options);

}  // namespace rssd
