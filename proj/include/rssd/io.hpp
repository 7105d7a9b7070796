#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rssd/compensator.hpp"
#include "rssd/lti.hpp"
#include "rssd/margins.hpp"
#include "rssd/nn_rssd.hpp"
#include "rssd/sim.hpp"

namespace rssd::io {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct PlantSetFile {
  int schema_version = kSchemaVersion;
  std::vector<StateSpacePlant> plants;
  // Optional free-form trim metadata per plant (null when absent).
  std::vector<Json> trim;

  PlantSet to_set() const { return PlantSet(plants); }
};

// Matrices are row-major nested arrays with explicit dimensions.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, int rows, int cols,
                        const std::string& what);
// Dimensions taken from the nesting; every row must have the same length.
Matrix matrix_from_json(const Json& j, const std::string& what);

PlantSetFile parse_plant_set(const Json& j);
Json plant_set_to_json(const PlantSetFile& file);

Json section_to_json(const Section& s);
Section section_from_json(const Json& j, const std::string& what);
Json bank_to_json(const CompensatorBank& bank);
CompensatorBank bank_from_json(const Json& j, BankSide side,
                               const std::string& what);

struct Controller {
  Matrix gain;
  CompensatorBank w_in;
  CompensatorBank w_out;
};

Json controller_to_json(const Controller& c);
// Missing banks default to identity banks sized from the gain.
Controller parse_controller(const Json& j);

struct RunConfig {
  std::optional<std::uint64_t> seed;
  FrequencyGrid grid = FrequencyGrid::standard();
  NnRssdOptions synthesis;
  std::optional<std::string> out_dir;
};

FrequencyGrid parse_grid(const Json& j);
// "lo:hi:count" as given on the command line.
FrequencyGrid parse_grid_spec(const std::string& spec);
RunConfig parse_config(const Json& j);

struct ScenarioEntry {
  Scenario scenario;
  std::optional<TrackingSpec> tracking;
};

// A weight with several deltas expands to one entry per delta.
std::vector<ScenarioEntry> parse_scenarios(const Json& j);

Json synthesis_report_to_json(const SynthesisReport& report);
Json spectrum_to_json(const std::vector<EigenInfo>& spectrum);
Json margin_to_json(const MarginReport& m);

// Canonical serialization: two-space indentation, sorted keys, trailing
// newline.
std::string dump(const Json& j);

Json read_json(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// Fixed formatting (%.12g) so identical values give identical files.
std::string format_number(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<double>& values);
  void add_row(const std::vector<std::string>& cells);
  std::string str() const { return text_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::string text_;
};

}  // namespace rssd::io
