#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "direx/copulas.hpp"
#include "direx/floodcase.hpp"
#include "direx/sample.hpp"

namespace direx {

// Numeric CSV with a mandatory header row.  Quoted fields (RFC-4180 style,
// doubled quotes as escapes) are accepted in headers and cells; every data
// cell must parse as a finite double.  Parse failures report line and column.
Sample load_csv(const std::string& path);
void write_csv(const std::string& path, const Sample& s);

// Shortest-exact plus fixed fallback: 17 significant digits round-trip every
// IEEE double, so write_csv followed by load_csv reproduces the sample
// bitwise.
std::string format_double(double x);

// JSON (de)serialisation of the model and reservoir configuration.  The
// top-level config document is
//   { "schema_version": 1, "model": {...}, "dam": {...} }
// with both sections optional (defaults fill the gaps).
nlohmann::json joint_model_to_json(const JointModel& model);
JointModel joint_model_from_json(const nlohmann::json& j);
nlohmann::json dam_spec_to_json(const DamSpec& dam);
DamSpec dam_spec_from_json(const nlohmann::json& j);

struct RunConfig {
    std::optional<JointModel> model;
    std::optional<DamSpec> dam;
};

RunConfig load_run_config(const std::string& path);

// Turns a textual direction spec into an admissible direction for the given
// sample: "e", "-e", a sign pattern like "++-", "pca" (direction of largest
// variance of the sample), or an explicit comma-separated vector, which is
// normalised before validation.
DirectionVector resolve_direction(const std::string& spec, const Sample& s,
                                  bool pca_on_correlation = false);

}  // namespace direx
