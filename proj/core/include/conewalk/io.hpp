#pragma once

#include <ostream>
#include <string>

#include "conewalk/asymptotics.hpp"
#include "conewalk/kernel.hpp"
#include "conewalk/model.hpp"

namespace conewalk {

inline constexpr const char* kCsvSchema = "# cone-walk v1";

// Model document: {"dimension": d, "atoms": [{"step": [..], "prob": "num/den"}],
// "cone": <cone spec>, "reversed": false}. Probabilities are strings (decimal
// or num/den) or JSON integers; floating-point literals are rejected since
// they cannot carry exact rationals. Parse errors name the offending atom.
WalkModel parse_model(const std::string& json_text, const std::string& origin = "<string>");
WalkModel load_model(const std::string& path);

// Canonical round-trip form of the base model (runtime decorrelation state
// is not part of the document).
std::string model_json(const WalkModel& m);
std::string cone_json(const ConeSpec& cone);

// Shortest exact decimal form, locale-independent.
std::string format_double(double v);

// CSV emitters; every file starts with the schema comment line. Columns are
// plain `,`-separated with `.` decimal points regardless of locale.
void write_slice_csv(std::ostream& os, const MassTable& table, int dim);
void write_survival_csv(std::ostream& os, const std::vector<int64_t>& checkpoints,
                        const std::vector<double>& survival);
void write_green_csv(std::ostream& os, const std::vector<Point>& targets,
                     const std::vector<GreenResult>& greens);
void write_ratio_csv(std::ostream& os, const RatioSeries& rs);

}  // namespace conewalk
