#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rssd/error.hpp"
#include "rssd/io.hpp"
#include "rssd/margins.hpp"
#include "rssd/nn_rssd.hpp"
#include "rssd/sim.hpp"
#include "rssd/vgap.hpp"

namespace py = pybind11;
using namespace rssd;

namespace {

FrequencyGrid grid_or_standard(const std::optional<FrequencyGrid>& grid) {
  return grid ? *grid : FrequencyGrid::standard();
}

io::Controller controller_from(const Matrix& gain, const std::string& controller_json) {
  if (controller_json.empty()) return io::parse_controller(io::Json{{"K", io::matrix_to_json(gain)}});
  io::Json j = io::Json::parse(controller_json);
  j["K"] = io::matrix_to_json(gain);
  return io::parse_controller(j);
}

py::dict margin_dict(const MarginReport& m) {
  py::dict d;
  d["gsm"] = m.gsm;
  d["disk_alpha"] = m.disk_alpha;
  d["mdgm_db"] = m.mdgm_db;
  d["mdpm_deg"] = m.mdpm_deg;
  d["alpha_input"] = m.alpha_input;
  d["alpha_output"] = m.alpha_output;
  d["worst_omega"] = m.worst_omega;
  d["worst_at_input"] = m.worst_at_input;
  d["degenerate"] = m.degenerate;
  return d;
}

}  // namespace

PYBIND11_MODULE(_rssd, m) {
  m.doc() = "Robust static output feedback design over a set of LTI plants";

  // Held for the interpreter lifetime; the translator below outlives m.
  static const py::handle error_type =
      py::exception<Error>(m, "RssdError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = error_type(e.what());
      err.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type.ptr(), err.ptr());
    } catch (const io::Json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<StateSpacePlant>(m, "Plant")
      .def(py::init<Matrix, Matrix, Matrix, Matrix, std::string>(), py::arg("A"),
           py::arg("B"), py::arg("C"), py::arg("D"), py::arg("label") = "")
      .def_static("static_gain", &StateSpacePlant::static_gain, py::arg("D"),
                  py::arg("label") = "")
      .def_property_readonly("A", &StateSpacePlant::a)
      .def_property_readonly("B", &StateSpacePlant::b)
      .def_property_readonly("C", &StateSpacePlant::c)
      .def_property_readonly("D", &StateSpacePlant::d)
      .def_property_readonly("label", &StateSpacePlant::label)
      .def_property_readonly("states", &StateSpacePlant::states)
      .def_property_readonly("inputs", &StateSpacePlant::inputs)
      .def_property_readonly("outputs", &StateSpacePlant::outputs)
      .def("__repr__", [](const StateSpacePlant& p) {
        return "<Plant '" + p.label() + "' n=" + std::to_string(p.states()) +
               " m=" + std::to_string(p.inputs()) + " r=" + std::to_string(p.outputs()) + ">";
      });

  py::class_<FrequencyGrid>(m, "FrequencyGrid")
      .def(py::init<std::vector<double>>(), py::arg("points"))
      .def_static("logspace", &FrequencyGrid::logspace, py::arg("lo"), py::arg("hi"),
                  py::arg("count"), py::arg("refine_depth") = 40, py::arg("rel_tol") = 1e-4)
      .def_static("standard", &FrequencyGrid::standard)
      .def_property_readonly("points", &FrequencyGrid::points);

  m.def(
      "nu_gap",
      [](const StateSpacePlant& p1, const StateSpacePlant& p2,
         const std::optional<FrequencyGrid>& grid, bool assume_minimal) {
        VgapOptions opt;
        if (assume_minimal) opt.pole_count_mode = PoleCountMode::kAssumeMinimal;
        const VgapResult r = nu_gap(p1, p2, grid_or_standard(grid), opt);
        py::dict d;
        d["value"] = r.value;
        d["condition_met"] = r.condition_met;
        d["wno"] = r.wno;
        d["peak_frequency"] = r.peak_frequency;
        return d;
      },
      py::arg("p1"), py::arg("p2"), py::arg("grid") = py::none(),
      py::arg("assume_minimal") = false);

  m.def(
      "central_plant",
      [](const std::vector<StateSpacePlant>& plants, const std::optional<FrequencyGrid>& grid) {
        const CentralPlantResult r = central_plant(PlantSet(plants), grid_or_standard(grid));
        py::dict d;
        d["index"] = r.index;
        d["epsilon"] = r.epsilon;
        d["gap_matrix"] = r.gap_matrix;
        d["max_gaps"] = r.max_gaps;
        return d;
      },
      py::arg("plants"), py::arg("grid") = py::none());

  m.def("closed_loop_matrix", &closed_loop_matrix, py::arg("plant"), py::arg("K"));
  m.def("is_internally_stable", &is_internally_stable, py::arg("plant"), py::arg("K"));
  m.def(
      "gsm",
      [](const StateSpacePlant& p, const Matrix& k, const std::optional<FrequencyGrid>& grid) {
        return gsm(p, k, grid_or_standard(grid));
      },
      py::arg("plant"), py::arg("K"), py::arg("grid") = py::none());
  m.def(
      "linf_norm",
      [](const StateSpacePlant& p, const std::optional<FrequencyGrid>& grid) {
        const NormResult r = linf_norm(p, grid_or_standard(grid));
        return py::make_tuple(r.norm, r.omega);
      },
      py::arg("plant"), py::arg("grid") = py::none());
  m.def(
      "disk_margin",
      [](const StateSpacePlant& p, const Matrix& k, const std::optional<FrequencyGrid>& grid) {
        return margin_dict(disk_margin(p, k, grid_or_standard(grid)));
      },
      py::arg("plant"), py::arg("K"), py::arg("grid") = py::none());

  m.def(
      "_parse_plant_set",
      [](const std::string& text) {
        const io::PlantSetFile f = io::parse_plant_set(io::Json::parse(text));
        std::vector<std::string> trim;
        for (const auto& t : f.trim) trim.push_back(t.dump());
        return py::make_tuple(f.plants, trim);
      },
      py::arg("text"));
  m.def(
      "_dump_plant_set",
      [](const std::vector<StateSpacePlant>& plants, const std::vector<std::string>& trim) {
        io::PlantSetFile f;
        f.plants = plants;
        for (const auto& t : trim) f.trim.push_back(io::Json::parse(t));
        if (f.trim.empty()) f.trim.resize(plants.size());
        return io::dump(io::plant_set_to_json(f));
      },
      py::arg("plants"), py::arg("trim"));

  m.def(
      "_synthesize",
      [](const std::vector<StateSpacePlant>& plants, const std::string& config_json,
         std::optional<std::uint64_t> seed) {
        io::RunConfig rc = io::parse_config(io::Json::parse(config_json));
        if (seed) rc.seed = seed;
        if (!rc.seed) throw Error(ErrorCode::kInvalidArgument, "synthesis needs a seed");
        rc.synthesis.scp.seed = *rc.seed;
        rc.synthesis.rssd.seed = *rc.seed + 0x9E3779B97F4A7C15ULL;
        SynthesisReport report;
        {
          py::gil_scoped_release release;
          report = run_nn_rssd(PlantSet(plants), rc.synthesis);
        }
        return io::synthesis_report_to_json(report).dump();
      },
      py::arg("plants"), py::arg("config_json"), py::arg("seed") = py::none());

  m.def(
      "_simulate",
      [](const StateSpacePlant& p, const Matrix& k, const std::string& scenario_json,
         const std::string& controller_json) {
        const io::Json wrapped{{"scenarios", io::Json::array({io::Json::parse(scenario_json)})}};
        const Scenario sc = io::parse_scenarios(wrapped).front().scenario;
        const io::Controller c = controller_from(k, controller_json);
        const TraceSet tr = simulate(p, c.gain, c.w_in, c.w_out, sc);
        py::dict d;
        d["time"] = tr.time;
        d["reference"] = tr.reference;
        d["output"] = tr.output;
        d["error"] = tr.error;
        d["input"] = tr.input;
        d["state"] = tr.state;
        d["diverged"] = tr.diverged;
        d["divergence_time"] = tr.divergence_time;
        return d;
      },
      py::arg("plant"), py::arg("K"), py::arg("scenario_json"), py::arg("controller_json") = "");
}
