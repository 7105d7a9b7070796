#include "rssd/nn_rssd.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/LU>

#include "rssd/error.hpp"

namespace rssd {
namespace {

J2Result reject(std::string why) {
  J2Result r;
  r.failure = std::move(why);
  return r;
}

std::vector<Interval> scp_boxes(const ScpConstraints& c) {
  std::vector<Interval> boxes;
  for (const auto* side : {&c.input_boxes, &c.output_boxes}) {
    for (const auto& box : *side) {
      boxes.insert(boxes.end(), {box.a, box.b, box.c, box.d});
    }
  }
  return boxes;
}

std::pair<CompensatorBank, CompensatorBank> decode_banks(
    std::span<const double> genes, const ScpConstraints& c) {
  const std::size_t split = 4 * c.input_boxes.size();
  return {decode_bank(genes.first(split), BankSide::kInput, c.input_boxes),
          decode_bank(genes.subspan(split), BankSide::kOutput, c.output_boxes)};
}

// Entry boxes must address states of the augmented plant, whose size
// depends on how many sections decode as dynamic.
bool entries_fit(const EigTarget& target, int states) {
  for (const auto& slot : target.slots) {
    for (const auto& e : slot.entries) {
      if (e.state >= states) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<Interval> rssd_boxes(const EigTarget& target) {
  std::vector<Interval> boxes;
  for (const auto& slot : target.slots) {
    boxes.push_back(slot.re_box);
    if (slot.complex_pair) boxes.push_back(slot.im_box);
  }
  for (const auto& slot : target.slots) {
    for (const auto& e : slot.entries) {
      boxes.push_back(e.re);
      if (slot.complex_pair) boxes.push_back(e.im);
    }
  }
  return boxes;
}

RssdGenome decode_rssd(std::span<const double> genes, const EigTarget& target) {
  const std::size_t expected = rssd_boxes(target).size();
  if (genes.size() != expected) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(expected) + " genes, got " +
                    std::to_string(genes.size()));
  }
  RssdGenome g;
  std::size_t at = 0;
  for (const auto& slot : target.slots) {
    const double re = genes[at++];
    const double im = slot.complex_pair ? genes[at++] : 0.0;
    g.eigenvalues.emplace_back(re, im);
  }
  for (const auto& slot : target.slots) {
    std::vector<Complex> values;
    for (std::size_t e = 0; e < slot.entries.size(); ++e) {
      const double re = genes[at++];
      const double im = slot.complex_pair ? genes[at++] : 0.0;
      values.emplace_back(re, im);
    }
    g.entries.push_back(std::move(values));
  }
  return g;
}

std::vector<double> encode_rssd(const RssdGenome& genome,
                                const EigTarget& target) {
  std::vector<double> genes;
  for (std::size_t k = 0; k < target.slots.size(); ++k) {
    genes.push_back(genome.eigenvalues.at(k).real());
    if (target.slots[k].complex_pair) {
      genes.push_back(genome.eigenvalues[k].imag());
    }
  }
  for (std::size_t k = 0; k < target.slots.size(); ++k) {
    for (const Complex v : genome.entries.at(k)) {
      genes.push_back(v.real());
      if (target.slots[k].complex_pair) genes.push_back(v.imag());
    }
  }
  return genes;
}

Matrix feedthrough_gain(const Matrix& assigned, const Matrix& d) {
  if (d.isZero(0.0)) return assigned;
  const Matrix lhs = Matrix::Identity(d.rows(), d.rows()) + d * assigned;
  Eigen::FullPivLU<Matrix> lu(lhs);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kIllPosedLoop, "I + D K is singular");
  }
  return assigned * lu.inverse();
}

J2Result j2_fitness(const StateSpacePlant& p_cp, const EigTarget& target,
                    const RssdGenome& genome, const FrequencyGrid& grid,
                    double kappa_limit) {
  for (const Complex v : genome.eigenvalues) {
    if (!in_region_s1(v, target)) return reject("desired eigenvalue outside S1");
  }
  if (!entries_fit(target, p_cp.states())) {
    return reject("constrained entry beyond the plant's state count");
  }
  try {
    const auto subspaces = slot_subspaces(p_cp, genome.eigenvalues);
    const EigenvectorSet vectors =
        select_vectors(subspaces, target, genome.entries);
    const GainResult g =
        compute_gain(vectors.w, vectors.r, p_cp.c(), kappa_limit);
    const Matrix gain = feedthrough_gain(g.gain, p_cp.d());

    const S1Check s1 =
        check_s1(spectrum(closed_loop_matrix(p_cp, gain)), target);
    if (!s1.pass) return reject("closed-loop eigenvalue outside S1");

    const ClosedLoop loop = close_loop(p_cp, gain);
    const NormResult norm = linf_norm(loop.realization, grid);
    if (!std::isfinite(norm.norm)) return reject("infinite four-block norm");
    J2Result out;
    out.j2 = norm.norm;
    out.gain = gain;
    out.kappa = g.kappa;
    return out;
  } catch (const Error& e) {
    return reject(std::string(to_string(e.code())) + ": " + e.what());
  }
}

LemmaCheck verify_lemma(const PlantSet& augmented, int cp_index,
                        const Matrix& gain,
                        const std::vector<Complex>& assigned_values,
                        const EigTarget& target, double j1_bar, double kappa,
                        const FrequencyGrid& grid, double kappa_limit) {
  LemmaCheck check;
  const StateSpacePlant& cp = augmented[cp_index];
  const CVector cl = eigenvalues(closed_loop_matrix(cp, gain));

  check.assigned = true;
  for (const Complex v : assigned_values) {
    for (const Complex w : {v, std::conj(v)}) {
      double nearest = std::numeric_limits<double>::infinity();
      for (int i = 0; i < cl.size(); ++i) {
        nearest = std::min(nearest, std::abs(cl(i) - w));
      }
      check.max_assign_error = std::max(check.max_assign_error, nearest);
    }
  }
  check.assigned = check.max_assign_error <= 1e-6;

  std::vector<EigenInfo> infos;
  for (int i = 0; i < cl.size(); ++i) infos.push_back(describe_eigenvalue(cl(i)));
  check.cp_in_s1 = check_s1(infos, target).pass;

  check.gsm_cp = gsm(cp, gain, grid);
  check.margin = check.gsm_cp > j1_bar;

  check.all_stable = true;
  for (const auto& p : augmented) {
    const bool ok = is_internally_stable(p, gain);
    check.plant_stable.push_back(ok);
    check.all_stable = check.all_stable && ok;
  }
  check.kappa = kappa;
  check.kappa_ok = kappa < kappa_limit;
  return check;
}

void validate_options(const NnRssdOptions& options, const PlantSet& set) {
  validate_constraints(options.constraints, set.inputs(), set.outputs());
  validate_ga_config(options.scp);
  validate_ga_config(options.rssd);
  int max_states = 0;
  for (const auto& p : set) max_states = std::max(max_states, p.states());
  validate_target(options.target, max_states + set.inputs() + set.outputs(),
                  set.outputs());
  if (!(options.j1_floor > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "j1_floor must be positive");
  }
  if (!(options.kappa_limit > 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "kappa limit must exceed 1");
  }
}

SynthesisReport run_nn_rssd(const PlantSet& set, const NnRssdOptions& options) {
  validate_options(options, set);
  const ScpConstraints& constraints = options.constraints;
  const FrequencyGrid& grid = options.grid;

  SynthesisReport report;
  report.seed = options.scp.seed;
  report.w_in = CompensatorBank::identity(set.inputs(), BankSide::kInput);
  report.w_out = CompensatorBank::identity(set.outputs(), BankSide::kOutput);

  const CentralPlantResult initial = central_plant(set, grid, options.vgap);
  report.initial_j1_bar = std::max(initial.epsilon, options.j1_floor);
  report.j1_bar = report.initial_j1_bar;
  report.cp_index = initial.index;

  const PlantRoots roots = plant_roots(set);
  const std::vector<Interval> boxes = scp_boxes(constraints);
  const std::vector<Interval> inner_boxes = rssd_boxes(options.target);

  struct Evaluation {
    double fitness = 0.0;
    std::optional<J1Result> j1;
  };
  auto evaluate_scp = [&](std::span<const double> genes) {
    Evaluation ev;
    CompensatorBank w_in, w_out;
    try {
      std::tie(w_in, w_out) = decode_banks(genes, constraints);
    } catch (const Error&) {
      ev.fitness = 2.0;  // one violation: the decode itself
      return ev;
    }
    const ConstraintReport cr =
        check_constraints(w_in, w_out, set, roots, constraints, grid);
    if (!cr.pass) {
      ev.fitness = 1.0 + cr.violations;
      return ev;
    }
    try {
      ev.j1 = j1_fitness(w_in, w_out, set, grid, options.vgap);
      ev.fitness = ev.j1->j1;
    } catch (const Error&) {
      ev.fitness = 2.0;
    }
    return ev;
  };

  bool done = false;
  // Runs the inner search for a candidate that beat the adaptive bound.
  auto run_inner = [&](std::span<const double> genes, const J1Result& j1,
                       int evaluation) {
    report.j1_bar = j1.j1;
    report.j1_bar_history.push_back(j1.j1);
    report.cp_index = j1.cp_index;
    std::tie(report.w_in, report.w_out) = decode_banks(genes, constraints);

    RssdInvocation inv;
    inv.scp_evaluation = evaluation;
    inv.j1 = j1.j1;
    inv.cp_index = j1.cp_index;
    inv.seed = options.rssd.seed + report.invocations.size();

    const double threshold = 1.0 / std::max(report.j1_bar, options.j1_floor);
    GaConfig cfg = options.rssd;
    cfg.seed = inv.seed;
    const StateSpacePlant& cp = j1.augmented_cp;
    auto fitness = [&](std::span<const double> g) {
      return j2_fitness(cp, options.target, decode_rssd(g, options.target),
                        grid, options.kappa_limit)
          .j2;
    };
    GaOptions ga;
    ga.observer = [&](int, const std::vector<GeneVector>&,
                      const std::vector<double>& fit) {
      return *std::min_element(fit.begin(), fit.end()) < threshold;
    };
    const GaResult result = ga_minimize(fitness, inner_boxes, cfg, ga);
    inv.generations = result.generations;
    inv.best_j2 = result.best_fitness;
    report.j2 = std::min(report.j2, result.best_fitness);

    if (!result.best.empty() && result.best_fitness < threshold) {
      const RssdGenome best = decode_rssd(result.best, options.target);
      const J2Result j2 =
          j2_fitness(cp, options.target, best, grid, options.kappa_limit);
      const PlantSet augmented = augment_set(report.w_out, set, report.w_in);
      std::vector<Complex> values = best.eigenvalues;
      LemmaCheck check =
          verify_lemma(augmented, j1.cp_index, *j2.gain, values,
                       options.target, report.j1_bar, j2.kappa, grid,
                       options.kappa_limit);
      inv.feasible = check.pass();
      if (inv.feasible) {
        report.feasible = true;
        report.gain = *j2.gain;
        report.j2 = j2.j2;
        report.kappa = j2.kappa;
        report.assigned_values = std::move(values);
        report.verification = std::move(check);
        done = true;
      }
    }
    report.invocations.push_back(inv);
  };

  int evaluation_count = 0;
  GaOptions scp_options;
  GaResult scp_result;
  if (options.trigger == TriggerMode::kPerEvaluation) {
    // Sequential so the bound and the inner search see evaluations in a
    // fixed order.
    scp_options.parallel = false;
    scp_options.observer = [&](int, const std::vector<GeneVector>&,
                               const std::vector<double>&) { return done; };
    auto fitness = [&](std::span<const double> genes) {
      const int index = evaluation_count++;
      if (done) return std::numeric_limits<double>::max();
      Evaluation ev = evaluate_scp(genes);
      if (ev.j1 && ev.j1->j1 < report.j1_bar) run_inner(genes, *ev.j1, index);
      return ev.fitness;
    };
    scp_result = ga_minimize(fitness, boxes, options.scp, scp_options);
  } else {
    std::mutex cache_mutex;
    std::map<GeneVector, Evaluation> cache;
    auto fitness = [&](std::span<const double> genes) {
      Evaluation ev = evaluate_scp(genes);
      std::lock_guard<std::mutex> lock(cache_mutex);
      cache.emplace(GeneVector(genes.begin(), genes.end()), ev);
      return ev.fitness;
    };
    scp_options.observer = [&](int, const std::vector<GeneVector>& population,
                               const std::vector<double>&) {
      for (const auto& genes : population) {
        const int index = evaluation_count++;
        if (done) continue;
        const Evaluation& ev = cache.at(genes);
        if (ev.j1 && ev.j1->j1 < report.j1_bar) run_inner(genes, *ev.j1, index);
      }
      cache.clear();
      return done;
    };
    scp_result = ga_minimize(fitness, boxes, options.scp, scp_options);
  }
  report.scp_generations = scp_result.generations;
  report.scp_evaluations = scp_result.evaluations;

  if (report.gain) {
    const PlantSet augmented = augment_set(report.w_out, set, report.w_in);
    for (const auto& p : augmented) {
      PlantOutcome outcome;
      outcome.label = p.label();
      outcome.spectrum = spectrum(closed_loop_matrix(p, *report.gain));
      outcome.stable = is_internally_stable(p, *report.gain);
      outcome.gsm = gsm(p, *report.gain, grid);
      report.plants.push_back(std::move(outcome));
    }
  }
  return report;
}

}  // namespace rssd
