// Acceptance checks. Prints one PASS/FAIL line per criterion; the exit code is
// nonzero when any selected criterion fails. Pass criterion numbers as
// arguments to run a subset.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "rssd/error.hpp"
#include "rssd/io.hpp"
#include "rssd/margins.hpp"
#include "rssd/nn_rssd.hpp"
#include "rssd/sim.hpp"
#include "rssd/vgap.hpp"

using namespace rssd;
using namespace rssd::testing;

namespace {

namespace fs = std::filesystem;

const fs::path kSource = RSSD_SOURCE_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double nearest_distance(const CVector& ev, Complex target) {
  double best = 1e300;
  for (int i = 0; i < ev.size(); ++i) best = std::min(best, std::abs(ev(i) - target));
  return best;
}

// Random stable SISO plant of order 1..3 with a nonzero direct term half the time.
StateSpacePlant stable_siso(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> order(1, 3);
  std::bernoulli_distribution coin(0.5);
  return random_plant(order(rng), 1, 1, rng, 0, coin(rng));
}

// sigma_max of the four-block operator on a dense grid, written out directly.
double dense_four_block(const StateSpacePlant& p, const Matrix& k, int points) {
  const int m = p.inputs(), r = p.outputs();
  const CMatrix kc = k.cast<Complex>();
  auto sigma = [&](double w) {
    const CMatrix g = evaluate(p, Complex(0.0, w));
    const CMatrix loop = (CMatrix::Identity(m, m) - kc * g).inverse();
    CMatrix left(r + m, m);
    left << g, CMatrix::Identity(m, m);
    CMatrix right(m, m + r);
    right << -CMatrix::Identity(m, m), kc;
    return Eigen::JacobiSVD<CMatrix>(left * loop * right).singularValues()(0);
  };
  double best = std::max(sigma(0.0), sigma(1e9));
  for (int i = 0; i < points; ++i) {
    best = std::max(best, sigma(std::pow(10.0, -4.0 + 10.0 * i / (points - 1))));
  }
  return best;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const FrequencyGrid grid = FrequencyGrid::standard();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> gain(-5.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double k1 = gain(rng), k2 = gain(rng);
    const VgapResult r = nu_gap(static_plant(k1), static_plant(k2), grid);
    worst = std::max(worst, std::abs(r.value - static_vgap(k1, k2)));
  }
  const PlantSet trio({static_plant(0.5), static_plant(1.0), static_plant(2.0)});
  const CentralPlantResult cp = central_plant(trio, grid);
  const double eps_err = std::abs(cp.epsilon - 1.0 / std::sqrt(10.0));
  const double elapsed = seconds_since(t0);
  return {worst < 1e-6 && cp.index == 1 && eps_err < 1e-6 && elapsed < 5.0,
          fmt("max error over 50 static pairs %.2e, central index %d, eps %.7f (|err| %.1e), "
              "%.2f s",
              worst, cp.index, cp.epsilon, eps_err, elapsed)};
}

Outcome criterion2() {
  const FrequencyGrid grid = FrequencyGrid::standard();
  std::mt19937_64 rng(202);
  double worst_sym = 0.0, worst_self = 0.0;
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const StateSpacePlant a = stable_siso(rng), b = stable_siso(rng), c = stable_siso(rng);
    const double ab = nu_gap(a, b, grid).value, ba = nu_gap(b, a, grid).value;
    const double bc = nu_gap(b, c, grid).value, ac = nu_gap(a, c, grid).value;
    worst_sym = std::max(worst_sym, std::abs(ab - ba));
    worst_self = std::max(worst_self, nu_gap(a, a, grid).value);
    if (ac > ab + bc + 1e-9) ++violations;
  }
  return {worst_sym < 1e-8 && worst_self < 1e-7 && violations == 0,
          fmt("symmetry %.2e, self-distance %.2e, triangle violations %d/100", worst_sym,
              worst_self, violations)};
}

Outcome criterion3() {
  const FrequencyGrid grid = FrequencyGrid::standard();
  const double b = gsm(scalar_tf(1, 0), Matrix::Constant(1, 1, -1.0), grid);
  const double err = std::abs(b - 1.0 / std::sqrt(2.0));
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> order(1, 3), dim(1, 2);
  int unstable = 0, unstable_nonzero = 0, stable = 0, stable_zero = 0;
  for (int i = 0; i < 50; ++i) {
    const int m = dim(rng), r = dim(rng);
    const StateSpacePlant p = random_plant(order(rng), m, r, rng, i % 2);
    const Matrix k = random_matrix(m, r, rng, 1.5);
    const double value = gsm(p, k, grid);
    if (hurwitz(closed_loop_oracle(p, k))) {
      ++stable;
      if (!(value > 0.0)) ++stable_zero;
    } else {
      ++unstable;
      if (value != 0.0) ++unstable_nonzero;
    }
  }
  return {err < 1e-4 && unstable > 0 && unstable_nonzero == 0 && stable_zero == 0,
          fmt("b(1/s,-1) = %.6f (|err| %.1e); %d non-stabilizing pairs, %d with b != 0; "
              "%d stabilizing, %d with b = 0",
              b, err, unstable, unstable_nonzero, stable, stable_zero)};
}

Outcome criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const FrequencyGrid grid = FrequencyGrid::logspace(1e-3, 1e4, 200);
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> order(1, 3), dim(1, 2);
  std::uniform_real_distribution<double> size(0.005, 0.2);
  int qualifying = 0, confirmed = 0, attempts = 0;
  while (qualifying < 200 && attempts < 20000) {
    ++attempts;
    const int m = dim(rng), r = dim(rng);
    const StateSpacePlant p1 = random_plant(order(rng), m, r, rng, attempts % 3 == 0);
    Matrix k;
    double b = 0.0;
    for (int t = 0; t < 30 && b < 0.15; ++t) {
      const Matrix cand = random_matrix(m, r, rng, 1.0);
      const double bc = gsm(p1, cand, grid);
      if (bc > b) {
        b = bc;
        k = cand;
      }
    }
    if (b <= 0.0) continue;
    const double s = size(rng);
    const StateSpacePlant p2(p1.a() + random_matrix(p1.states(), p1.states(), rng, s),
                             p1.b() + random_matrix(p1.states(), m, rng, s),
                             p1.c() + random_matrix(r, p1.states(), rng, s), p1.d());
    double gap = 1.0;
    try {
      gap = nu_gap(p1, p2, grid).value;
    } catch (const Error&) {
      continue;
    }
    if (!(b > gap)) continue;
    ++qualifying;
    if (hurwitz(closed_loop_oracle(p2, k))) ++confirmed;
  }
  const double elapsed = seconds_since(t0);
  return {qualifying >= 200 && confirmed == qualifying && elapsed < 60.0,
          fmt("%d/%d triples with b > delta stabilize the perturbed plant (%d draws), %.1f s",
              confirmed, qualifying, attempts, elapsed)};
}

Outcome criterion5() {
  Matrix a(2, 2), b(2, 1);
  a << 0, 1, 0, 0;
  b << 0, 1;
  const StateSpacePlant di(a, b, Matrix::Identity(2, 2), Matrix::Zero(2, 1));
  EigTarget two;
  two.slots.resize(2);
  const auto v = select_vectors(slot_subspaces(di, {-1.0, -2.0}), two, {{}, {}});
  const Matrix k = compute_gain(v.w, v.r, di.c()).gain;
  const double di_err = (k - Matrix{{-2.0, -3.0}}).cwiseAbs().maxCoeff();

  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> states(2, 5), inputs(1, 3);
  std::uniform_real_distribution<double> re(-6.0, -0.5), im(0.5, 4.0), scale(0.2, 5.0);
  std::bernoulli_distribution pair(0.35);
  double worst_eig = 0.0, worst_scale = 0.0;
  int done = 0, skipped = 0;
  while (done < 50) {
    const int n = states(rng), m = std::min(inputs(rng), n);
    const Matrix an = random_matrix(n, n, rng), bn = random_matrix(n, m, rng);
    const StateSpacePlant p(an, bn, Matrix::Identity(n, n), Matrix::Zero(n, m));
    EigTarget target;
    std::vector<Complex> values;
    int placed = 0;
    while (placed < n) {
      EigSlot slot;
      if (n - placed >= 2 && pair(rng)) {
        slot.complex_pair = true;
        slot.value = Complex(re(rng), im(rng));
        placed += 2;
      } else {
        slot.value = re(rng);
        placed += 1;
      }
      values.push_back(slot.value);
      target.slots.push_back(slot);
    }
    GainResult g;
    EigenvectorSet vecs;
    try {
      vecs = select_vectors(slot_subspaces(p, values), target,
                            std::vector<std::vector<Complex>>(values.size()));
      g = compute_gain(vecs.w, vecs.r, p.c());
    } catch (const Error&) {
      ++skipped;  // nearly repeated targets can leave C R ill-conditioned
      continue;
    }
    const CVector ev = eigenvalues(closed_loop_oracle(p, g.gain));
    for (const Complex lambda : values) {
      worst_eig = std::max(worst_eig, nearest_distance(ev, lambda) / std::max(1.0, std::abs(lambda)));
      if (lambda.imag() != 0.0) {
        worst_eig = std::max(worst_eig, nearest_distance(ev, std::conj(lambda)) /
                                            std::max(1.0, std::abs(lambda)));
      }
    }
    Vector s(n);
    for (int i = 0; i < n; ++i) s(i) = scale(rng) * (i % 2 ? -1.0 : 1.0);
    const Matrix scaled = compute_gain(vecs.w * s.asDiagonal(), vecs.r * s.asDiagonal(),
                                       p.c(), 1e12).gain;
    worst_scale = std::max(worst_scale, (scaled - g.gain).cwiseAbs().maxCoeff() /
                                            std::max(1.0, g.gain.cwiseAbs().maxCoeff()));
    ++done;
  }
  return {di_err < 1e-9 && worst_eig < 1e-6 && worst_scale < 1e-10,
          fmt("double integrator K error %.1e; 50 random plants: eigenvalue error %.1e, "
              "column-scaling change %.1e (%d ill-conditioned draws redrawn)",
              di_err, worst_eig, worst_scale, skipped)};
}

Outcome criterion6() {
  const FrequencyGrid grid = FrequencyGrid::standard();
  std::vector<StateSpacePlant> systems;
  // w^2 / (s^2 + 2 zeta w s + w^2), zeta = 0.1, w = 3.
  const double zeta = 0.1, wn = 3.0;
  Matrix a(2, 2), b(2, 1), c(1, 2);
  a << 0, 1, -wn * wn, -2 * zeta * wn;
  b << 0, 1;
  c << wn * wn, 0;
  systems.emplace_back(a, b, c, Matrix::Zero(1, 1));
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> order(1, 6), dim(1, 3);
  while (systems.size() < 20) {
    systems.push_back(random_plant(order(rng), dim(rng), dim(rng), rng, 0, systems.size() % 2));
  }
  double worst = 0.0;
  double resonance = 0.0;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    const double engine = linf_norm(systems[i], grid).norm;
    const double dense = dense_linf(systems[i]);
    worst = std::max(worst, std::abs(engine - dense) / dense);
    if (i == 0) resonance = engine;
  }
  const double analytic = 1.0 / (2.0 * zeta * std::sqrt(1.0 - zeta * zeta));
  const double res_err = std::abs(resonance - analytic) / analytic;
  return {worst < 0.01 && res_err < 0.01,
          fmt("max relative deviation from the dense oracle %.2e over 20 systems; "
              "resonance peak %.4f vs %.4f",
              worst, resonance, analytic)};
}

struct Synthesis {
  PlantSet set;
  io::RunConfig config;
  SynthesisReport report;
  std::string report_json;
  double seconds = 0.0;
};

Synthesis& synthetic_run() {
  static std::optional<Synthesis> cached;
  if (!cached) {
    const io::PlantSetFile file =
        io::parse_plant_set(io::read_json(kSource / "data" / "synthetic_family.json"));
    io::RunConfig cfg = io::parse_config(io::read_json(kSource / "configs" / "synthetic.json"));
    cfg.synthesis.scp.seed = cfg.seed.value_or(1);
    cfg.synthesis.rssd.seed = cfg.synthesis.scp.seed + 0x9E3779B97F4A7C15ULL;
    const auto t0 = std::chrono::steady_clock::now();
    SynthesisReport report = run_nn_rssd(file.to_set(), cfg.synthesis);
    const double secs = seconds_since(t0);
    const std::string json = io::dump(io::synthesis_report_to_json(report));
    cached.emplace(Synthesis{file.to_set(), cfg, std::move(report), json, secs});
  }
  return *cached;
}

Outcome criterion7() {
  Synthesis& run = synthetic_run();
  const SynthesisReport& rep = run.report;
  if (!rep.feasible || !rep.gain) {
    return {false, fmt("run infeasible after %.1f s", run.seconds)};
  }
  const Matrix& k = *rep.gain;
  const EigTarget& target = run.config.synthesis.target;
  std::vector<std::string> notes;

  // Independent re-verification: eigenvalue oracle on every closed loop, the
  // damping region on the central loop, a dense four-block sweep for the margin
  // and the assigned eigenvalues.
  bool all_stable = true;
  std::vector<StateSpacePlant> augmented;
  for (const auto& p : run.set) augmented.push_back(augment_plant(rep.w_out, p, rep.w_in));
  for (const auto& p : augmented) {
    const Matrix acl = p.a() + p.b() * (Matrix::Identity(p.inputs(), p.inputs()) - k * p.d())
                                           .inverse() * k * p.c();
    if (!hurwitz(acl)) all_stable = false;
  }
  const StateSpacePlant& cp = augmented[rep.cp_index];
  const Matrix acl_cp = cp.a() + cp.b() * (Matrix::Identity(cp.inputs(), cp.inputs()) - k * cp.d())
                                              .inverse() * k * cp.c();
  const CVector ev = Eigen::EigenSolver<Matrix>(acl_cp).eigenvalues();
  bool in_region = true;
  for (int i = 0; i < ev.size(); ++i) {
    const double zeta = -ev(i).real() / std::abs(ev(i));
    if (!(ev(i).real() < 0.0) || zeta < target.zeta_min - 1e-12) in_region = false;
  }
  double assign_err = 0.0;
  for (const Complex v : rep.assigned_values) {
    assign_err = std::max(assign_err, nearest_distance(ev, v));
  }
  const double b = 1.0 / dense_four_block(cp, k, 200000);
  const double eps = central_plant(PlantSet(augmented), run.config.grid).epsilon;
  const bool margin = b > rep.j1_bar && eps <= rep.j1_bar + 1e-9;
  const bool kappa_ok = rep.kappa < run.config.synthesis.kappa_limit;

  bool decreasing = !rep.j1_bar_history.empty() &&
                    rep.j1_bar_history.front() < rep.initial_j1_bar;
  for (std::size_t i = 1; i < rep.j1_bar_history.size(); ++i) {
    if (!(rep.j1_bar_history[i] < rep.j1_bar_history[i - 1])) decreasing = false;
  }

  const SynthesisReport again = run_nn_rssd(run.set, run.config.synthesis);
  const bool identical = io::dump(io::synthesis_report_to_json(again)) == run.report_json;

  const bool pass = all_stable && in_region && assign_err < 1e-6 && margin && kappa_ok &&
                    decreasing && identical && run.seconds < 600.0;
  return {pass, fmt("feasible in %.1f s; 3 loops stable: %s; cp loop in S1: %s; assignment "
                    "error %.1e; b = %.4f > J1bar = %.4f >= eps %.4f; kappa %.1f; history "
                    "strictly decreasing (%zu values): %s; rerun identical: %s",
                    run.seconds, all_stable ? "yes" : "no", in_region ? "yes" : "no",
                    assign_err, b, rep.j1_bar, eps, rep.kappa, rep.j1_bar_history.size(),
                    decreasing ? "yes" : "no", identical ? "yes" : "no")};
}

Outcome criterion8() {
  Synthesis& run = synthetic_run();
  const SynthesisReport& rep = run.report;
  if (!rep.feasible || !rep.gain) return {false, "no synthesized loop (criterion 7 infeasible)"};
  const Matrix& k = *rep.gain;
  const StateSpacePlant& plant = run.set[rep.cp_index];

  // Decay along the dominant mode.
  const Matrix acl = simulation_matrix(plant, k, rep.w_in, rep.w_out, std::nullopt);
  Eigen::EigenSolver<Matrix> es(acl);
  int dom = 0;
  for (int i = 1; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i).real() > es.eigenvalues()(dom).real()) dom = i;
  }
  const Complex lambda = es.eigenvalues()(dom);
  Vector x0 = es.eigenvectors().col(dom).real();
  if (x0.norm() < 1e-8) x0 = es.eigenvectors().col(dom).imag();
  x0 /= x0.norm();
  const double sigma = lambda.real();
  const double tau = 1.0 / std::abs(sigma);
  const double period = lambda.imag() != 0.0 ? 2.0 * std::numbers::pi / std::abs(lambda.imag())
                                             : 0.0;
  // Windows a whole number of periods apart see the same oscillation phase.
  const double t1 = 0.5 * tau;
  const double t2 = period > 0.0 ? t1 + period * std::ceil(2.5 * tau / period) : 3.0 * tau;
  Scenario free;
  free.name = "free";
  free.dt = std::min(1e-3, tau / 200.0);
  free.duration = t2 + period + free.dt;
  free.initial_state = x0;
  const TraceSet tr = simulate(plant, k, rep.w_in, rep.w_out, free);
  auto envelope = [&](double t_start) {
    double peak = 0.0;
    for (std::size_t i = 0; i < tr.time.size(); ++i) {
      if (tr.time[i] >= t_start - 1e-12 && tr.time[i] <= t_start + period + 1e-12) {
        peak = std::max(peak, tr.state.row(i).norm());
      }
    }
    return peak;
  };
  const double rate = std::log(envelope(t2) / envelope(t1)) / (t2 - t1);
  const double rate_err = std::abs(rate - sigma) / std::abs(sigma);

  // Superposition of reference and disturbance responses.
  Signal step;
  step.kind = SignalKind::kStep;
  step.magnitude = 1.0;
  Signal doublet;
  doublet.kind = SignalKind::kDoublet;
  doublet.magnitude = 0.5;
  doublet.start = 0.5;
  doublet.width = 0.5;
  Scenario r_only, d_only, both;
  r_only.name = "r";
  r_only.reference = {step};
  r_only.duration = 5.0;
  d_only = r_only;
  d_only.name = "d";
  d_only.reference.clear();
  d_only.disturbance = {doublet};
  both = r_only;
  both.name = "rd";
  both.disturbance = {doublet};
  const TraceSet tr_r = simulate(plant, k, rep.w_in, rep.w_out, r_only);
  const TraceSet tr_d = simulate(plant, k, rep.w_in, rep.w_out, d_only);
  const TraceSet tr_rd = simulate(plant, k, rep.w_in, rep.w_out, both);
  const double superposition =
      std::max((tr_rd.output - tr_r.output - tr_d.output).cwiseAbs().maxCoeff(),
               (tr_rd.input - tr_r.input - tr_d.input).cwiseAbs().maxCoeff());

  // Step-size halving.
  Scenario fine = r_only;
  fine.dt = r_only.dt / 2.0;
  const TraceSet tr_fine = simulate(plant, k, rep.w_in, rep.w_out, fine);
  const double y_coarse = tr_r.output(tr_r.output.rows() - 1, 0);
  const double y_fine = tr_fine.output(tr_fine.output.rows() - 1, 0);
  const double drift = std::abs(y_coarse - y_fine) / std::max(std::abs(y_fine), 1e-12);

  return {rate_err < 0.05 && superposition < 1e-8 && drift < 1e-3 && !tr.diverged,
          fmt("decay rate %.4f vs dominant Re(lambda) %.4f (%.2f%%); superposition error "
              "%.1e; dt-halving terminal drift %.1e",
              rate, sigma, 100.0 * rate_err, superposition, drift)};
}

Outcome criterion9() {
  // L = P K with P = 1/s, K = -1 under u = K y: the loop transfer 1/s.
  const MarginReport m =
      disk_margin(scalar_tf(1, 0), Matrix::Constant(1, 1, -1.0), FrequencyGrid::standard());
  // Classical cross-check: 1/s crosses unity gain at 1 rad/s with phase -90 deg.
  const double classical_pm = 180.0 + std::arg(1.0 / Complex(0.0, 1.0)) * 180.0 / std::numbers::pi;
  const bool pass = std::abs(m.disk_alpha - 2.0) < 1e-6 && std::abs(m.mdpm_deg - 90.0) < 0.1 &&
                    std::abs(classical_pm - 90.0) < 1e-9;
  return {pass, fmt("alpha %.9f, MDPM +/-%.4f deg (classical PM %.1f deg), MDGM %.1f dB",
                    m.disk_alpha, m.mdpm_deg, classical_pm, m.mdgm_db)};
}

Outcome criterion10() {
  const fs::path file = kSource / "data" / "nav_controller.json";
  const std::string original = io::read_text(file);
  const io::Controller c = io::parse_controller(io::Json::parse(original));
  const std::string first = io::dump(io::controller_to_json(c));
  const fs::path tmp = fs::temp_directory_path() / "rssd_acceptance_controller.json";
  io::write_text(tmp, first);
  const std::string second =
      io::dump(io::controller_to_json(io::parse_controller(io::read_json(tmp))));
  fs::remove(tmp);
  const Matrix expected{{1.13, 0.78, 0.26, 0.14, 0.13},
                        {-1.07, -0.78, 0.74, 0.009, 0.54},
                        {0.19, -0.06, -0.002, 1.29, 0.04}};
  CompensatorBank first_section{{c.w_in.sections.at(0)}, BankSide::kInput};
  const double dc = freq_response(realize_bank(first_section), 0.0)(0, 0).real();
  const bool pass = original == first && first == second && c.gain == expected &&
                    c.w_in.channels() == 3 && c.w_out.channels() == 5 &&
                    std::abs(dc - 0.7287) <= 1e-4;
  return {pass, fmt("file -> read -> write identical: %s; second cycle identical: %s; "
                    "W_in section 1 DC gain %.6f",
                    original == first ? "yes" : "no", first == second ? "yes" : "no", dc)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, criterion10};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (int i = 1; i <= 10; ++i) selected.push_back(i);
  }
  int failures = 0;
  for (int id : selected) {
    if (id < 1 || id > 10) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    Outcome out;
    try {
      out = criteria[id - 1]();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s - %s\n", id, out.pass ? "PASS" : "FAIL", out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
