#include "rssd/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rssd/error.hpp"

namespace rssd::io {
namespace {

[[noreturn]] void parse_error(const std::string& message) {
  throw Error(ErrorCode::kParseError, message);
}

const Json& require(const Json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) {
    parse_error(what + ": missing '" + key + "'");
  }
  return j.at(key);
}

double as_number(const Json& j, const std::string& what) {
  if (!j.is_number()) parse_error(what + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) parse_error(what + ": value is not finite");
  return v;
}

int as_int(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) parse_error(what + ": expected an integer");
  return j.get<int>();
}

double number_or(const Json& j, const char* key, double fallback,
                 const std::string& what) {
  return j.contains(key) ? as_number(j.at(key), what + "." + key) : fallback;
}

int int_or(const Json& j, const char* key, int fallback,
           const std::string& what) {
  return j.contains(key) ? as_int(j.at(key), what + "." + key) : fallback;
}

bool bool_or(const Json& j, const char* key, bool fallback,
             const std::string& what) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) parse_error(what + "." + key + ": expected true/false");
  return j.at(key).get<bool>();
}

std::string string_or(const Json& j, const char* key, std::string fallback,
                      const std::string& what) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) parse_error(what + "." + key + ": expected a string");
  return j.at(key).get<std::string>();
}

Interval interval_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) parse_error(what + ": expected [lo, hi]");
  Interval iv{as_number(j[0], what + "[0]"), as_number(j[1], what + "[1]")};
  if (iv.lo > iv.hi) parse_error(what + ": lo exceeds hi");
  return iv;
}

std::vector<double> numbers_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) parse_error(what + ": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_number(j[i], what + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// Infinite values are written as the strings "inf" / "-inf".
Json real(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

GaConfig ga_from_json(const Json& j, GaConfig c, const std::string& what) {
  if (!j.is_object()) parse_error(what + ": expected an object");
  c.population = int_or(j, "population", c.population, what);
  c.max_generations = int_or(j, "max_generations", c.max_generations, what);
  c.tournament = int_or(j, "tournament", c.tournament, what);
  c.crossover_prob = number_or(j, "crossover_prob", c.crossover_prob, what);
  c.blend_alpha = number_or(j, "blend_alpha", c.blend_alpha, what);
  c.mutation_prob = number_or(j, "mutation_prob", c.mutation_prob, what);
  c.mutation_scale = number_or(j, "mutation_scale", c.mutation_scale, what);
  c.elite = int_or(j, "elite", c.elite, what);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) {
      parse_error(what + ".seed: expected a non-negative integer");
    }
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  return c;
}

SectionBox section_box_from_json(const Json& j, const std::string& what) {
  return SectionBox{interval_from_json(require(j, "a", what), what + ".a"),
                    interval_from_json(require(j, "b", what), what + ".b"),
                    interval_from_json(require(j, "c", what), what + ".c"),
                    interval_from_json(require(j, "d", what), what + ".d")};
}

std::vector<SectionBox> boxes_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) parse_error(what + ": expected an array of boxes");
  std::vector<SectionBox> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(section_box_from_json(j[i], what + "[" + std::to_string(i) + "]"));
  }
  return out;
}

ScpConstraints constraints_from_json(const Json& j, const std::string& what) {
  ScpConstraints c;
  c.input_boxes = boxes_from_json(require(j, "input_boxes", what), what + ".input_boxes");
  c.output_boxes =
      boxes_from_json(require(j, "output_boxes", what), what + ".output_boxes");
  c.dc_floor_db = number_or(j, "dc_floor_db", c.dc_floor_db, what);
  if (j.contains("band")) {
    const Interval band = interval_from_json(j.at("band"), what + ".band");
    c.band_lo = band.lo;
    c.band_hi = band.hi;
  }
  if (j.contains("per_plant_band_hi")) {
    c.per_plant_band_hi =
        numbers_from_json(j.at("per_plant_band_hi"), what + ".per_plant_band_hi");
  }
  c.cancellation_tol = number_or(j, "cancellation_tol", c.cancellation_tol, what);
  return c;
}

EigTarget target_from_json(const Json& j, const std::string& what) {
  EigTarget t;
  t.zeta_min = number_or(j, "zeta_min", t.zeta_min, what);
  if (j.contains("sigma_max") && !j.at("sigma_max").is_null()) {
    t.sigma_max = as_number(j.at("sigma_max"), what + ".sigma_max");
  }
  const Json& slots = require(j, "slots", what);
  if (!slots.is_array()) parse_error(what + ".slots: expected an array");
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const std::string sw = what + ".slots[" + std::to_string(k) + "]";
    const Json& s = slots[k];
    EigSlot slot;
    slot.complex_pair = bool_or(s, "pair", false, sw);
    slot.re_box = interval_from_json(require(s, "re", sw), sw + ".re");
    if (slot.complex_pair) {
      slot.im_box = interval_from_json(require(s, "im", sw), sw + ".im");
      if (!(slot.im_box.lo > 0.0)) parse_error(sw + ".im: damped frequency box must be positive");
    }
    slot.value = Complex(slot.re_box.mid(), slot.complex_pair ? slot.im_box.mid() : 0.0);
    if (s.contains("entries")) {
      const Json& entries = s.at("entries");
      if (!entries.is_array()) parse_error(sw + ".entries: expected an array");
      for (std::size_t e = 0; e < entries.size(); ++e) {
        const std::string ew = sw + ".entries[" + std::to_string(e) + "]";
        EntryConstraint ec;
        ec.state = as_int(require(entries[e], "state", ew), ew + ".state");
        ec.re = interval_from_json(require(entries[e], "re", ew), ew + ".re");
        if (slot.complex_pair) {
          ec.im = interval_from_json(require(entries[e], "im", ew), ew + ".im");
        }
        slot.entries.push_back(ec);
      }
    }
    t.slots.push_back(std::move(slot));
  }
  return t;
}

Signal signal_from_json(const Json& j, const std::string& what) {
  Signal s;
  if (j.is_null()) return s;
  const std::string kind = j.is_string() ? j.get<std::string>()
                                         : string_or(j, "kind", "zero", what);
  if (kind == "zero" || kind == "none") return s;
  if (kind == "step") {
    s.kind = SignalKind::kStep;
  } else if (kind == "doublet") {
    s.kind = SignalKind::kDoublet;
    s.width = as_number(require(j, "width", what), what + ".width");
  } else if (kind == "sine") {
    s.kind = SignalKind::kSine;
    s.frequency = as_number(require(j, "frequency", what), what + ".frequency");
  } else {
    parse_error(what + ": unknown signal kind '" + kind + "'");
  }
  s.magnitude = as_number(require(j, "magnitude", what), what + ".magnitude");
  s.start = number_or(j, "start", 0.0, what);
  return s;
}

std::vector<Signal> signals_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) parse_error(what + ": expected one signal per channel");
  std::vector<Signal> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(signal_from_json(j[i], what + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, int rows, int cols,
                        const std::string& what) {
  if (!j.is_array()) parse_error(what + ": expected an array of rows");
  if (static_cast<int>(j.size()) != rows) {
    parse_error(what + ": has " + std::to_string(j.size()) + " rows, expected " +
                std::to_string(rows));
  }
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const Json& row = j[i];
    const std::string rw = what + " row " + std::to_string(i);
    if (!row.is_array()) parse_error(rw + ": expected an array");
    if (static_cast<int>(row.size()) != cols) {
      parse_error(rw + ": has " + std::to_string(row.size()) +
                  " entries, expected " + std::to_string(cols));
    }
    for (int k = 0; k < cols; ++k) {
      m(i, k) = as_number(row[k], rw + " col " + std::to_string(k));
    }
  }
  return m;
}

Matrix matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) parse_error(what + ": expected an array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = rows > 0 && j[0].is_array() ? static_cast<int>(j[0].size()) : 0;
  return matrix_from_json(j, rows, cols, what);
}

PlantSetFile parse_plant_set(const Json& j) {
  PlantSetFile file;
  file.schema_version = int_or(j, "schema_version", kSchemaVersion, "plant set");
  if (file.schema_version != kSchemaVersion) {
    parse_error("plant set: unsupported schema_version " +
                std::to_string(file.schema_version));
  }
  const Json& plants = require(j, "plants", "plant set");
  if (!plants.is_array() || plants.empty()) {
    parse_error("plant set: 'plants' must be a nonempty array");
  }
  for (std::size_t i = 0; i < plants.size(); ++i) {
    const Json& p = plants[i];
    const std::string label =
        string_or(p, "label", "plant" + std::to_string(i), "plants[" + std::to_string(i) + "]");
    const std::string what = "plant '" + label + "'";
    const int n = as_int(require(p, "n", what), what + " n");
    const int m = as_int(require(p, "m", what), what + " m");
    const int r = as_int(require(p, "r", what), what + " r");
    if (n < 0 || m < 1 || r < 1) parse_error(what + ": need n >= 0, m >= 1, r >= 1");
    Matrix a = matrix_from_json(require(p, "A", what), n, n, what + " A");
    Matrix b = matrix_from_json(require(p, "B", what), n, m, what + " B");
    Matrix c = matrix_from_json(require(p, "C", what), r, n, what + " C");
    Matrix d = p.contains("D") ? matrix_from_json(p.at("D"), r, m, what + " D")
                               : Matrix::Zero(r, m);
    if (!file.plants.empty() &&
        (m != file.plants.front().inputs() || r != file.plants.front().outputs())) {
      throw Error(ErrorCode::kDimensionMismatch,
                  what + ": has " + std::to_string(m) + " inputs and " +
                      std::to_string(r) + " outputs, the set has " +
                      std::to_string(file.plants.front().inputs()) + " and " +
                      std::to_string(file.plants.front().outputs()));
    }
    file.plants.emplace_back(std::move(a), std::move(b), std::move(c),
                             std::move(d), label);
    file.trim.push_back(p.contains("trim") ? p.at("trim") : Json());
  }
  return file;
}

Json plant_set_to_json(const PlantSetFile& file) {
  Json plants = Json::array();
  for (std::size_t i = 0; i < file.plants.size(); ++i) {
    const StateSpacePlant& p = file.plants[i];
    Json entry = {{"label", p.label()},  {"n", p.states()},
                  {"m", p.inputs()},     {"r", p.outputs()},
                  {"A", matrix_to_json(p.a())}, {"B", matrix_to_json(p.b())},
                  {"C", matrix_to_json(p.c())}, {"D", matrix_to_json(p.d())}};
    if (i < file.trim.size() && !file.trim[i].is_null()) entry["trim"] = file.trim[i];
    plants.push_back(std::move(entry));
  }
  return {{"schema_version", file.schema_version}, {"plants", std::move(plants)}};
}

Json section_to_json(const Section& s) {
  Json j = {{"a", s.a}, {"b", s.b}, {"c", s.c}, {"d", s.d}};
  if (s.is_static) j["static"] = true;
  return j;
}

Section section_from_json(const Json& j, const std::string& what) {
  if (!j.is_object()) parse_error(what + ": expected an object");
  Section s = Section::first_order(number_or(j, "a", 0.0, what),
                                   as_number(require(j, "b", what), what + ".b"),
                                   number_or(j, "c", 0.0, what),
                                   as_number(require(j, "d", what), what + ".d"));
  s.is_static = bool_or(j, "static", false, what);
  if (s.is_static && (s.a != 0.0 || s.c != 0.0)) {
    parse_error(what + ": a static section must have a = c = 0");
  }
  return s;
}

Json bank_to_json(const CompensatorBank& bank) {
  Json out = Json::array();
  for (const auto& s : bank.sections) out.push_back(section_to_json(s));
  return out;
}

CompensatorBank bank_from_json(const Json& j, BankSide side,
                               const std::string& what) {
  if (!j.is_array()) parse_error(what + ": expected an array of sections");
  CompensatorBank bank;
  bank.side = side;
  for (std::size_t i = 0; i < j.size(); ++i) {
    bank.sections.push_back(section_from_json(j[i], what + "[" + std::to_string(i) + "]"));
  }
  return bank;
}

Json controller_to_json(const Controller& c) {
  return {{"K", matrix_to_json(c.gain)},
          {"w_in", bank_to_json(c.w_in)},
          {"w_out", bank_to_json(c.w_out)}};
}

Controller parse_controller(const Json& j) {
  Controller c;
  c.gain = matrix_from_json(require(j, "K", "controller"), "controller K");
  c.w_in = j.contains("w_in")
               ? bank_from_json(j.at("w_in"), BankSide::kInput, "controller w_in")
               : CompensatorBank::identity(static_cast<int>(c.gain.rows()),
                                           BankSide::kInput);
  c.w_out = j.contains("w_out")
                ? bank_from_json(j.at("w_out"), BankSide::kOutput, "controller w_out")
                : CompensatorBank::identity(static_cast<int>(c.gain.cols()),
                                            BankSide::kOutput);
  if (c.w_in.channels() != c.gain.rows() || c.w_out.channels() != c.gain.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "controller: K is " + std::to_string(c.gain.rows()) + "x" +
                    std::to_string(c.gain.cols()) + " but banks have " +
                    std::to_string(c.w_in.channels()) + " input and " +
                    std::to_string(c.w_out.channels()) + " output sections");
  }
  return c;
}

FrequencyGrid parse_grid(const Json& j) {
  const std::string what = "grid";
  if (!j.is_object()) parse_error("grid: expected an object");
  const int depth = int_or(j, "refine_depth", 40, what);
  const double tol = number_or(j, "rel_tol", 1e-4, what);
  try {
    if (j.contains("omega")) {
      return FrequencyGrid(numbers_from_json(j.at("omega"), "grid.omega"), depth, tol);
    }
    return FrequencyGrid::logspace(number_or(j, "lo", 1e-3, what),
                                   number_or(j, "hi", 1e5, what),
                                   int_or(j, "points", 400, what), depth, tol);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) throw;
    parse_error(std::string("grid: ") + e.what());
  }
}

FrequencyGrid parse_grid_spec(const std::string& spec) {
  std::stringstream ss(spec);
  std::string lo, hi, count;
  if (!std::getline(ss, lo, ':') || !std::getline(ss, hi, ':') ||
      !std::getline(ss, count) ) {
    parse_error("grid spec '" + spec + "': expected lo:hi:count");
  }
  try {
    std::size_t used = 0;
    const double l = std::stod(lo, &used);
    if (used != lo.size()) throw std::invalid_argument(lo);
    const double h = std::stod(hi, &used);
    if (used != hi.size()) throw std::invalid_argument(hi);
    const int c = std::stoi(count, &used);
    if (used != count.size()) throw std::invalid_argument(count);
    return FrequencyGrid::logspace(l, h, c);
  } catch (const std::logic_error&) {
    parse_error("grid spec '" + spec + "': expected lo:hi:count");
  } catch (const Error& e) {
    parse_error("grid spec '" + spec + "': " + e.what());
  }
}

RunConfig parse_config(const Json& j) {
  if (!j.is_object()) parse_error("config: expected an object");
  RunConfig cfg;
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) {
      parse_error("config.seed: expected a non-negative integer");
    }
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("grid")) cfg.grid = parse_grid(j.at("grid"));
  NnRssdOptions& s = cfg.synthesis;
  s.grid = cfg.grid;
  if (j.contains("vgap")) {
    s.vgap.pole_count_mode = bool_or(j.at("vgap"), "assume_minimal", false, "config.vgap")
                                 ? PoleCountMode::kAssumeMinimal
                                 : PoleCountMode::kStateMatrix;
  }
  if (j.contains("scp")) s.constraints = constraints_from_json(j.at("scp"), "config.scp");
  if (j.contains("target")) s.target = target_from_json(j.at("target"), "config.target");
  if (j.contains("ga_scp")) s.scp = ga_from_json(j.at("ga_scp"), s.scp, "config.ga_scp");
  if (j.contains("ga_rssd")) s.rssd = ga_from_json(j.at("ga_rssd"), s.rssd, "config.ga_rssd");
  s.kappa_limit = number_or(j, "kappa_limit", s.kappa_limit, "config");
  s.j1_floor = number_or(j, "j1_floor", s.j1_floor, "config");
  const std::string trigger = string_or(j, "trigger", "per_evaluation", "config");
  if (trigger == "per_evaluation") {
    s.trigger = TriggerMode::kPerEvaluation;
  } else if (trigger == "per_generation") {
    s.trigger = TriggerMode::kPerGeneration;
  } else {
    parse_error("config.trigger: expected per_evaluation or per_generation");
  }
  if (j.contains("out")) cfg.out_dir = string_or(j, "out", "", "config");
  return cfg;
}

std::vector<ScenarioEntry> parse_scenarios(const Json& j) {
  const Json& list = require(j, "scenarios", "scenario file");
  if (!list.is_array()) parse_error("scenario file: 'scenarios' must be an array");
  std::vector<ScenarioEntry> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Json& s = list[i];
    const std::string name = string_or(s, "name", "scenario" + std::to_string(i),
                                       "scenarios[" + std::to_string(i) + "]");
    const std::string what = "scenario '" + name + "'";
    ScenarioEntry entry;
    Scenario& sc = entry.scenario;
    sc.name = name;
    sc.dt = number_or(s, "dt", sc.dt, what);
    sc.duration = number_or(s, "duration", sc.duration, what);
    if (s.contains("reference")) sc.reference = signals_from_json(s.at("reference"), what + ".reference");
    if (s.contains("disturbance")) {
      sc.disturbance = signals_from_json(s.at("disturbance"), what + ".disturbance");
    }
    if (s.contains("initial_state")) {
      const auto x0 = numbers_from_json(s.at("initial_state"), what + ".initial_state");
      sc.initial_state = Eigen::Map<const Vector>(x0.data(), static_cast<Eigen::Index>(x0.size()));
    }
    if (s.contains("tracking")) {
      const Json& t = s.at("tracking");
      const std::string tw = what + ".tracking";
      TrackingSpec spec;
      const Json& channels = require(t, "channels", tw);
      if (!channels.is_array()) parse_error(tw + ".channels: expected an array");
      for (const auto& c : channels) spec.channels.push_back(as_int(c, tw + ".channels"));
      if (t.contains("band")) spec.band = numbers_from_json(t.at("band"), tw + ".band");
      if (t.contains("rms_ceiling")) {
        spec.rms_ceiling = numbers_from_json(t.at("rms_ceiling"), tw + ".rms_ceiling");
      }
      spec.settle_time = number_or(t, "settle_time", 0.0, tw);
      if (t.contains("rms_window")) {
        const Interval w = interval_from_json(t.at("rms_window"), tw + ".rms_window");
        spec.rms_start = w.lo;
        spec.rms_end = w.hi;
      }
      entry.tracking = spec;
    }
    std::vector<double> deltas{1.0};
    if (s.contains("weight")) {
      const Json& w = s.at("weight");
      const std::string ww = what + ".weight";
      WeightInjection inj;
      inj.weight = section_from_json(require(w, "section", ww), ww + ".section");
      inj.channel = int_or(w, "channel", -1, ww);
      inj.scale = number_or(w, "scale", 1.0, ww);
      if (w.contains("deltas")) deltas = numbers_from_json(w.at("deltas"), ww + ".deltas");
      sc.weight = inj;
    }
    if (!sc.weight || deltas.size() == 1) {
      if (sc.weight) sc.weight->delta = deltas.front();
      out.push_back(std::move(entry));
      continue;
    }
    for (double delta : deltas) {
      ScenarioEntry copy = entry;
      copy.scenario.weight->delta = delta;
      copy.scenario.name = name + (delta >= 0 ? "_dplus" : "_dminus");
      out.push_back(std::move(copy));
    }
  }
  return out;
}

Json spectrum_to_json(const std::vector<EigenInfo>& spectrum) {
  Json out = Json::array();
  for (const auto& e : spectrum) {
    out.push_back({{"re", e.value.real()},
                   {"im", e.value.imag()},
                   {"zeta", e.damping},
                   {"omega_n", e.natural_frequency}});
  }
  return out;
}

Json margin_to_json(const MarginReport& m) {
  return {{"gsm", real(m.gsm)},
          {"gsm_omega", real(m.gsm_omega)},
          {"disk_alpha", real(m.disk_alpha)},
          {"mdgm_db", real(m.mdgm_db)},
          {"mdpm_deg", real(m.mdpm_deg)},
          {"alpha_input", real(m.alpha_input)},
          {"alpha_output", real(m.alpha_output)},
          {"omega_input", real(m.omega_input)},
          {"omega_output", real(m.omega_output)},
          {"worst_omega", real(m.worst_omega)},
          {"worst_at", m.worst_at_input ? "input" : "output"},
          {"degenerate", m.degenerate}};
}

Json synthesis_report_to_json(const SynthesisReport& r) {
  Json j;
  j["feasible"] = r.feasible;
  j["seed"] = r.seed;
  j["initial_j1_bar"] = real(r.initial_j1_bar);
  j["j1_bar"] = real(r.j1_bar);
  j["j1_bar_history"] = r.j1_bar_history;
  j["j2"] = r.j2 < kRssdPenalty ? real(r.j2) : Json();
  j["feasibility_threshold"] = real(1.0 / r.j1_bar);
  j["cp_index"] = r.cp_index;
  j["kappa"] = real(r.kappa);
  j["scp_generations"] = r.scp_generations;
  j["scp_evaluations"] = r.scp_evaluations;
  if (r.gain) {
    j["controller"] = controller_to_json(Controller{*r.gain, r.w_in, r.w_out});
  } else {
    j["controller"] = Json();
  }
  Json assigned = Json::array();
  for (const Complex z : r.assigned_values) assigned.push_back(complex_to_json(z));
  j["assigned_eigenvalues"] = assigned;
  Json invocations = Json::array();
  for (const auto& inv : r.invocations) {
    invocations.push_back({{"scp_evaluation", inv.scp_evaluation},
                           {"j1", inv.j1},
                           {"cp_index", inv.cp_index},
                           {"seed", inv.seed},
                           {"generations", inv.generations},
                           {"best_j2", inv.best_j2 < kRssdPenalty ? real(inv.best_j2) : Json()},
                           {"feasible", inv.feasible}});
  }
  j["rssd_invocations"] = invocations;
  if (r.verification) {
    const LemmaCheck& v = *r.verification;
    j["verification"] = {{"assigned", v.assigned},
                         {"cp_in_s1", v.cp_in_s1},
                         {"margin", v.margin},
                         {"all_stable", v.all_stable},
                         {"kappa_ok", v.kappa_ok},
                         {"max_assign_error", real(v.max_assign_error)},
                         {"gsm_cp", real(v.gsm_cp)},
                         {"kappa", real(v.kappa)},
                         {"plant_stable", v.plant_stable},
                         {"pass", v.pass()}};
  } else {
    j["verification"] = Json();
  }
  Json plants = Json::array();
  for (const auto& p : r.plants) {
    plants.push_back({{"label", p.label},
                      {"stable", p.stable},
                      {"gsm", real(p.gsm)},
                      {"spectrum", spectrum_to_json(p.spectrum)}});
  }
  j["plants"] = plants;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    parse_error("'" + path.string() + "': " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) parse_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) parse_error("failed writing '" + path.string() + "'");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  add_row(header);
}

void CsvWriter::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  add_row(cells);
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) {
    throw Error(ErrorCode::kInvalidArgument, "CSV row width does not match header");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
}

void CsvWriter::save(const std::filesystem::path& path) const {
  write_text(path, text_);
}

}  // namespace rssd::io
