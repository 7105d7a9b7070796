#include "commands.hpp"

#include <cctype>
#include <cmath>
#include <iostream>

#include <Eigen/LU>

#include "rssd/error.hpp"
#include "rssd/io.hpp"
#include "rssd/margins.hpp"
#include "rssd/nn_rssd.hpp"
#include "rssd/sim.hpp"
#include "rssd/vgap.hpp"

namespace rssd::cli {
namespace {

namespace fs = std::filesystem;
using io::Json;

struct Loaded {
  io::PlantSetFile file;
  io::RunConfig config;
  fs::path out;
};

Loaded load(const CommonArgs& args) {
  Loaded l;
  l.file = io::parse_plant_set(io::read_json(args.plantset));
  if (args.config) l.config = io::parse_config(io::read_json(*args.config));
  if (args.grid) {
    l.config.grid = io::parse_grid_spec(*args.grid);
    l.config.synthesis.grid = l.config.grid;
  }
  if (args.seed) l.config.seed = args.seed;
  l.out = args.out ? *args.out : fs::path(l.config.out_dir.value_or("rssd_out"));
  fs::create_directories(l.out);
  return l;
}

// File-name-safe tag for a plant.
std::string plant_tag(int index, const std::string& label) {
  std::string tag = "p" + std::to_string(index);
  if (!label.empty()) tag += "_";
  for (char c : label) {
    tag += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
  }
  return tag;
}

double db(double v) { return v > 0.0 ? 20.0 * std::log10(v) : -INFINITY; }

io::Controller load_controller(const fs::path& path) {
  const Json j = io::read_json(path);
  if (j.contains("controller")) {
    if (j.at("controller").is_null()) {
      throw Error(ErrorCode::kParseError,
                  "'" + path.string() + "' holds an infeasible report without a controller");
    }
    return io::parse_controller(j.at("controller"));
  }
  return io::parse_controller(j);
}

void check_controller(const io::Controller& c, const PlantSet& set) {
  if (c.gain.rows() != set.inputs() || c.gain.cols() != set.outputs()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "controller K is " + std::to_string(c.gain.rows()) + "x" +
                    std::to_string(c.gain.cols()) + ", plants need " +
                    std::to_string(set.inputs()) + "x" + std::to_string(set.outputs()));
  }
}

// Curves, eigenvalue table and margins for every plant of the set.
Json analyze_into(const PlantSet& set, const io::Controller& c,
                  const FrequencyGrid& grid, const fs::path& out) {
  check_controller(c, set);
  io::CsvWriter margins({"plant", "stable", "gsm", "disk_alpha", "mdgm_db",
                         "mdpm_deg", "worst_omega", "worst_at", "alpha_input",
                         "alpha_output"});
  Json plants = Json::array();
  for (int i = 0; i < set.size(); ++i) {
    const StateSpacePlant aug = augment_plant(c.w_out, set[i], c.w_in);
    const std::string tag = plant_tag(i, set[i].label());
    Json entry = {{"label", set[i].label()}, {"index", i}};

    const auto spec = spectrum(closed_loop_matrix(aug, c.gain));
    io::CsvWriter eig({"re", "im", "zeta", "omega_n"});
    for (const auto& e : spec) {
      eig.add_row({e.value.real(), e.value.imag(), e.damping, e.natural_frequency});
    }
    eig.save(out / ("eigen_" + tag + ".csv"));
    entry["closed_loop_spectrum"] = io::spectrum_to_json(spec);

    const bool stable = is_internally_stable(aug, c.gain);
    entry["stable"] = stable;
    std::optional<SensitivityCurves> sens;
    std::optional<UncertaintyBounds> bounds;
    if (stable) {
      sens = sensitivity_curves(aug, c.gain, grid);
      bounds = uncertainty_bounds(aug, c.gain, grid);
      const MarginReport m = disk_margin(aug, c.gain, grid);
      entry["margins"] = io::margin_to_json(m);
      entry["min_output_multiplicative"] = bounds->min_output;
      entry["min_output_multiplicative_omega"] = bounds->min_output_omega;
      entry["min_inverse_input_multiplicative"] = bounds->min_inverse_input;
      entry["min_inverse_input_multiplicative_omega"] = bounds->min_inverse_input_omega;
      try {
        const CMatrix p0 = freq_response(aug, 0.0);
        const CMatrix so0 =
            (CMatrix::Identity(p0.rows(), p0.rows()) - p0 * c.gain.cast<Complex>())
                .inverse();
        entry["so_dc_max_db"] = db(max_singular_value(so0));
      } catch (const Error& e) {
        // Pole at the origin: S_o(0) is the limit, zero for an integrating loop.
        if (e.code() != ErrorCode::kSingularAtFrequency) throw;
        entry["so_dc_max_db"] = db(sens->so_max.front());
      }
      margins.add_row(std::vector<std::string>{
          tag, "1", io::format_number(m.gsm), io::format_number(m.disk_alpha),
          io::format_number(m.mdgm_db), io::format_number(m.mdpm_deg),
          io::format_number(m.worst_omega), m.worst_at_input ? "input" : "output",
          io::format_number(m.alpha_input), io::format_number(m.alpha_output)});
    } else {
      std::cerr << "warning: closed loop of plant '" << set[i].label()
                << "' is unstable; loop curves skipped\n";
      entry["error"] = std::string(to_string(ErrorCode::kUnstableLoop));
      margins.add_row(std::vector<std::string>{tag, "0", "0", "nan", "nan", "nan",
                                               "nan", "", "nan", "nan"});
    }

    io::CsvWriter curves({"omega", "aug_smax_db", "aug_smin_db", "so_max_db",
                          "so_min_db", "si_max_db", "si_min_db", "kso_max_db",
                          "kso_min_db", "out_mult_bound", "inv_in_bound"});
    const auto& pts = grid.points();
    for (std::size_t k = 0; k < pts.size(); ++k) {
      std::vector<double> row{pts[k], NAN, NAN, NAN, NAN, NAN, NAN, NAN, NAN, NAN, NAN};
      try {
        const CMatrix g = freq_response(aug, pts[k]);
        row[1] = db(max_singular_value(g));
        row[2] = db(min_singular_value(g));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kSingularAtFrequency) throw;
      }
      if (sens) {
        row[3] = db(sens->so_max[k]);
        row[4] = db(sens->so_min[k]);
        row[5] = db(sens->si_max[k]);
        row[6] = db(sens->si_min[k]);
        row[7] = db(sens->kso_max[k]);
        row[8] = db(sens->kso_min[k]);
        row[9] = bounds->output_multiplicative[k];
        row[10] = bounds->inverse_input_multiplicative[k];
      }
      curves.add_row(row);
    }
    curves.save(out / ("curves_" + tag + ".csv"));
    plants.push_back(std::move(entry));
  }
  margins.save(out / "margins.csv");
  Json report = {{"plants", plants}, {"controller", io::controller_to_json(c)}};
  io::write_text(out / "analysis_report.json", io::dump(report));
  return report;
}

}  // namespace

int cmd_vgap(const CommonArgs& args) {
  const Loaded l = load(args);
  const PlantSet set = l.file.to_set();
  const CentralPlantResult cp =
      central_plant(set, l.config.grid, l.config.synthesis.vgap);

  std::vector<std::string> header{"plant"};
  for (const auto& p : set) header.push_back(p.label());
  io::CsvWriter gaps(header);
  for (int i = 0; i < set.size(); ++i) {
    std::vector<std::string> row{set[i].label()};
    for (int k = 0; k < set.size(); ++k) row.push_back(io::format_number(cp.gap_matrix(i, k)));
    gaps.add_row(row);
  }
  gaps.save(l.out / "gap_matrix.csv");

  Json max_gaps = Json::array();
  for (int i = 0; i < set.size(); ++i) {
    max_gaps.push_back({{"label", set[i].label()}, {"max_vgap", cp.max_gaps[i]}});
  }
  const Json report = {{"central_index", cp.index},
                       {"central_label", set[cp.index].label()},
                       {"epsilon", cp.epsilon},
                       {"max_vgaps", max_gaps},
                       {"gap_matrix", io::matrix_to_json(cp.gap_matrix)}};
  io::write_text(l.out / "vgap_report.json", io::dump(report));
  std::cout << "central plant: " << cp.index << " (" << set[cp.index].label()
            << "), epsilon = " << io::format_number(cp.epsilon) << "\n";
  return kExitOk;
}

int cmd_synth(const CommonArgs& args) {
  Loaded l = load(args);
  if (!l.config.seed) {
    std::cerr << "error: synth needs a seed (config \"seed\" or --seed)\n";
    return kExitUsage;
  }
  if (!args.config) {
    std::cerr << "error: synth needs --config with scp and target sections\n";
    return kExitUsage;
  }
  NnRssdOptions& opt = l.config.synthesis;
  opt.scp.seed = *l.config.seed;
  opt.rssd.seed = *l.config.seed + 0x9E3779B97F4A7C15ULL;
  const PlantSet set = l.file.to_set();
  const SynthesisReport report = run_nn_rssd(set, opt);

  io::write_text(l.out / "synthesis_report.json",
                 io::dump(io::synthesis_report_to_json(report)));
  io::CsvWriter history({"step", "j1_bar"});
  history.add_row({0.0, report.initial_j1_bar});
  for (std::size_t i = 0; i < report.j1_bar_history.size(); ++i) {
    history.add_row({static_cast<double>(i + 1), report.j1_bar_history[i]});
  }
  history.save(l.out / "j1_history.csv");

  if (report.gain) {
    const io::Controller c{*report.gain, report.w_in, report.w_out};
    io::write_text(l.out / "controller.json", io::dump(io::controller_to_json(c)));
    analyze_into(set, c, opt.grid, l.out / "analysis");
  }
  std::cout << (report.feasible ? "feasible" : "infeasible")
            << ": J1bar = " << io::format_number(report.j1_bar)
            << ", J2 = " << io::format_number(report.j2)
            << ", RSSD invocations = " << report.invocations.size() << "\n";
  return kExitOk;
}

int cmd_analyze(const CommonArgs& args, const fs::path& controller) {
  const Loaded l = load(args);
  const io::Controller c = load_controller(controller);
  const Json report = analyze_into(l.file.to_set(), c, l.config.grid, l.out);
  int unstable = 0;
  for (const auto& p : report.at("plants")) unstable += p.at("stable").get<bool>() ? 0 : 1;
  std::cout << "analyzed " << report.at("plants").size() << " plants, "
            << unstable << " unstable\n";
  return kExitOk;
}

int cmd_sim(const CommonArgs& args, const fs::path& controller,
            const fs::path& scenarios) {
  const Loaded l = load(args);
  const PlantSet set = l.file.to_set();
  const io::Controller c = load_controller(controller);
  check_controller(c, set);
  const auto entries = io::parse_scenarios(io::read_json(scenarios));

  Json results = Json::array();
  for (const auto& entry : entries) {
    for (int i = 0; i < set.size(); ++i) {
      const TraceSet tr = simulate(set[i], c.gain, c.w_in, c.w_out, entry.scenario);
      const int r = set.outputs(), m = set.inputs();
      std::vector<std::string> header{"time"};
      for (int k = 0; k < r; ++k) header.push_back("ref" + std::to_string(k));
      for (int k = 0; k < r; ++k) header.push_back("y" + std::to_string(k));
      for (int k = 0; k < r; ++k) header.push_back("err" + std::to_string(k));
      for (int k = 0; k < m; ++k) header.push_back("u" + std::to_string(k));
      io::CsvWriter csv(header);
      for (std::size_t s = 0; s < tr.time.size(); ++s) {
        std::vector<double> row{tr.time[s]};
        for (int k = 0; k < r; ++k) row.push_back(tr.reference(s, k));
        for (int k = 0; k < r; ++k) row.push_back(tr.output(s, k));
        for (int k = 0; k < r; ++k) row.push_back(tr.error(s, k));
        for (int k = 0; k < m; ++k) row.push_back(tr.input(s, k));
        csv.add_row(row);
      }
      const std::string tag = plant_tag(i, set[i].label());
      csv.save(l.out / ("traces_" + entry.scenario.name + "_" + tag + ".csv"));

      Json res = {{"scenario", entry.scenario.name},
                  {"plant", set[i].label()},
                  {"diverged", tr.diverged},
                  {"divergence_time", tr.diverged ? Json(tr.divergence_time) : Json()}};
      if (entry.tracking) {
        try {
          const TrackingReport t = tracking_metrics(tr, *entry.tracking);
          Json channels = Json::array();
          for (const auto& ch : t.channels) {
            channels.push_back({{"channel", ch.channel},
                                {"max_error", ch.max_error},
                                {"rms", ch.rms},
                                {"band_pass", ch.band_pass},
                                {"rms_pass", ch.rms_pass}});
          }
          res["tracking"] = {{"pass", t.pass}, {"channels", channels}};
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kDivergentTrace) throw;
          res["tracking"] = {{"pass", false}, {"error", e.what()}};
        }
      }
      if (tr.diverged) {
        std::cerr << "warning: scenario '" << entry.scenario.name << "' on plant '"
                  << set[i].label() << "' diverged at t = " << tr.divergence_time << " s\n";
      }
      results.push_back(std::move(res));
    }
  }
  io::write_text(l.out / "sim_report.json", io::dump(Json{{"results", results}}));
  std::cout << "simulated " << entries.size() << " scenarios on " << set.size()
            << " plants\n";
  return kExitOk;
}

int cmd_verify(const CommonArgs& args, const fs::path& report_path) {
  const Loaded l = load(args);
  if (!args.config) {
    std::cerr << "error: verify needs --config with the target used for synthesis\n";
    return kExitUsage;
  }
  const PlantSet set = l.file.to_set();
  const Json report = io::read_json(report_path);
  const io::Controller c = load_controller(report_path);
  check_controller(c, set);
  auto number = [&](const char* key) {
    if (!report.contains(key) || !report.at(key).is_number()) {
      throw Error(ErrorCode::kParseError, std::string("report: missing number '") + key + "'");
    }
    return report.at(key).get<double>();
  };
  const double j1_bar = number("j1_bar");
  const double kappa = number("kappa");
  const int cp_index = static_cast<int>(number("cp_index"));
  if (cp_index < 0 || cp_index >= set.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "report: cp_index out of range");
  }
  std::vector<Complex> values;
  for (const auto& z : report.value("assigned_eigenvalues", Json::array())) {
    values.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
  }
  const PlantSet augmented = augment_set(c.w_out, set, c.w_in);
  const NnRssdOptions& opt = l.config.synthesis;
  const LemmaCheck check = verify_lemma(augmented, cp_index, c.gain, values, opt.target,
                                        j1_bar, kappa, l.config.grid, opt.kappa_limit);
  const Json out = {{"assigned", check.assigned},
                    {"cp_in_s1", check.cp_in_s1},
                    {"margin", check.margin},
                    {"all_stable", check.all_stable},
                    {"kappa_ok", check.kappa_ok},
                    {"max_assign_error", check.max_assign_error},
                    {"gsm_cp", check.gsm_cp},
                    {"j1_bar", j1_bar},
                    {"plant_stable", check.plant_stable},
                    {"pass", check.pass()}};
  io::write_text(l.out / "verify_report.json", io::dump(out));
  std::cout << "assigned eigenvalues: " << (check.assigned ? "ok" : "FAIL") << "\n"
            << "cp spectrum in S1:    " << (check.cp_in_s1 ? "ok" : "FAIL") << "\n"
            << "b(P_cp, K) > J1bar:   " << (check.margin ? "ok" : "FAIL") << " ("
            << io::format_number(check.gsm_cp) << " vs " << io::format_number(j1_bar) << ")\n"
            << "all loops stable:     " << (check.all_stable ? "ok" : "FAIL") << "\n"
            << "kappa(CR) < limit:    " << (check.kappa_ok ? "ok" : "FAIL") << "\n";
  return check.pass() ? kExitOk : kExitVerifyFailed;
}

}  // namespace rssd::cli
