#include "rssd/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "rssd/error.hpp"
#include "rssd/parallel.hpp"

namespace rssd {
namespace {

constexpr double kWorst = std::numeric_limits<double>::max();

double sanitize(double value) {
  return std::isnan(value) ? kWorst : value;
}

class Breeder {
 public:
  Breeder(std::span<const Interval> boxes, const GaConfig& config)
      : boxes_(boxes), config_(config), rng_(config.seed) {}

  GeneVector random_genome() {
    GeneVector g(boxes_.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] = boxes_[i].width() > 0.0
                 ? std::uniform_real_distribution<double>(boxes_[i].lo,
                                                          boxes_[i].hi)(rng_)
                 : boxes_[i].lo;
    }
    return g;
  }

  void clamp(GeneVector& g) const {
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] = std::clamp(g[i], boxes_[i].lo, boxes_[i].hi);
    }
  }

  int tournament(const std::vector<double>& fitness) {
    std::uniform_int_distribution<int> pick(0,
                                            static_cast<int>(fitness.size()) - 1);
    int best = pick(rng_);
    for (int k = 1; k < config_.tournament; ++k) {
      const int other = pick(rng_);
      if (fitness[other] < fitness[best] ||
          (fitness[other] == fitness[best] && other < best)) {
        best = other;
      }
    }
    return best;
  }

  // BLX-alpha: each child gene uniform on the parents' interval widened by
  // alpha times its length on both sides.
  void crossover(GeneVector& x, GeneVector& y) {
    if (!(unit_(rng_) < config_.crossover_prob)) return;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double lo = std::min(x[i], y[i]);
      const double hi = std::max(x[i], y[i]);
      const double span = hi - lo;
      if (span == 0.0) continue;
      std::uniform_real_distribution<double> blend(
          lo - config_.blend_alpha * span, hi + config_.blend_alpha * span);
      x[i] = blend(rng_);
      y[i] = blend(rng_);
    }
  }

  void mutate(GeneVector& g) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(unit_(rng_) < config_.mutation_prob)) continue;
      const double sd = config_.mutation_scale * boxes_[i].width();
      if (sd > 0.0) g[i] += std::normal_distribution<double>(0.0, sd)(rng_);
    }
  }

 private:
  std::span<const Interval> boxes_;
  const GaConfig& config_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace

void validate_ga_config(const GaConfig& c) {
  auto bad = [](const char* what) {
    throw Error(ErrorCode::kInvalidArgument, std::string("GA config: ") + what);
  };
  if (c.population < 4) bad("population must be >= 4");
  if (c.max_generations < 0) bad("max_generations must be >= 0");
  if (c.tournament < 1) bad("tournament size must be >= 1");
  if (!(c.crossover_prob >= 0.0 && c.crossover_prob <= 1.0)) {
    bad("crossover probability outside [0, 1]");
  }
  if (!(c.mutation_prob >= 0.0 && c.mutation_prob <= 1.0)) {
    bad("mutation probability outside [0, 1]");
  }
  if (!(c.mutation_scale >= 0.0) || !(c.blend_alpha >= 0.0)) {
    bad("mutation scale and blend alpha must be >= 0");
  }
  if (c.elite < 0 || c.elite > c.population) bad("elite count out of range");
}

GaResult ga_minimize(const FitnessFunction& fitness,
                     std::span<const Interval> boxes, const GaConfig& config,
                     const GaOptions& options) {
  validate_ga_config(config);
  for (const auto& box : boxes) {
    if (!(box.lo <= box.hi) || !std::isfinite(box.lo) ||
        !std::isfinite(box.hi)) {
      throw Error(ErrorCode::kInvalidArgument, "GA box must be finite and nonempty");
    }
  }
  GaResult result;
  result.best_fitness = kWorst;
  if (config.max_generations == 0) return result;

  Breeder breeder(boxes, config);
  const int size = config.population;
  std::vector<GeneVector> population;
  population.reserve(size);
  for (const auto& g : options.initial_population) {
    if (static_cast<int>(population.size()) == size) break;
    if (g.size() != boxes.size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "initial genome length does not match the boxes");
    }
    population.push_back(g);
    breeder.clamp(population.back());
  }
  while (static_cast<int>(population.size()) < size) {
    population.push_back(breeder.random_genome());
  }

  std::vector<double> scores(size);
  for (int gen = 0; gen < config.max_generations; ++gen) {
    auto evaluate = [&](int i) { scores[i] = sanitize(fitness(population[i])); };
    if (options.parallel) {
      parallel_for(size, evaluate);
    } else {
      for (int i = 0; i < size; ++i) evaluate(i);
    }
    result.evaluations += size;
    result.generations = gen + 1;

    for (int i = 0; i < size; ++i) {
      if (result.best.empty() || scores[i] < result.best_fitness) {
        result.best_fitness = scores[i];
        result.best = population[i];
      }
    }
    result.history.push_back(result.best_fitness);

    if (options.observer && options.observer(gen, population, scores)) {
      result.stopped = true;
      break;
    }
    if (gen + 1 == config.max_generations) break;

    std::vector<int> order(size);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a] < scores[b]; });

    std::vector<GeneVector> next;
    next.reserve(size);
    for (int e = 0; e < config.elite; ++e) next.push_back(population[order[e]]);
    while (static_cast<int>(next.size()) < size) {
      GeneVector x = population[breeder.tournament(scores)];
      GeneVector y = population[breeder.tournament(scores)];
      breeder.crossover(x, y);
      breeder.mutate(x);
      breeder.mutate(y);
      breeder.clamp(x);
      breeder.clamp(y);
      next.push_back(std::move(x));
      if (static_cast<int>(next.size()) < size) next.push_back(std::move(y));
    }
    population = std::move(next);
  }
  return result;
}

}  // namespace rssd
