#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rssd/eigassign.hpp"

namespace rssd {

// Real-coded GA settings.
struct GaConfig {
  int population = 50;
  int max_generations = 20;
  int tournament = 3;
  double crossover_prob = 0.8;
  double blend_alpha = 0.5;
  double mutation_prob = 0.1;
  // Standard deviation of a mutation, as a fraction of the gene's box width.
  double mutation_scale = 0.1;
  int elite = 2;
  std::uint64_t seed = 1;
};

void validate_ga_config(const GaConfig& config);

using GeneVector = std::vector<double>;
// Lower is better. Must be safe to call concurrently when evaluation is
// parallel. NaN is treated as the worst possible value.
using FitnessFunction = std::function<double(std::span<const double>)>;

// Called after each generation is evaluated, with the population in
// evaluation order. Returning true stops the run.
using GenerationObserver = std::function<bool(
    int generation, const std::vector<GeneVector>& population,
    const std::vector<double>& fitness)>;

struct GaOptions {
  bool parallel = true;
  // Replaces the random first generation when nonempty (clamped to boxes).
  std::vector<GeneVector> initial_population;
  GenerationObserver observer;
};

struct GaResult {
  GeneVector best;
  double best_fitness = 0.0;
  // Best-so-far fitness after each generation.
  std::vector<double> history;
  int generations = 0;
  int evaluations = 0;
  bool stopped = false;
};

// A generation is one evaluated population; max_generations == 0 evaluates
// nothing and returns an empty history.
GaResult ga_minimize(const FitnessFunction& fitness,
                     std::span<const Interval> boxes, const GaConfig& config,
                     const GaOptions& options = {});

}  // namespace rssd
