#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "xvine/estimation.hpp"
#include "xvine/matrix.hpp"
#include "xvine/model.hpp"
#include "xvine/vine.hpp"

namespace xvine {

/// Header row of names, numeric body. Throws Io when the file cannot be opened, Parse on bad content.
Matrix read_csv(const std::string& path);
Matrix parse_csv(std::istream& in);
/// 17 significant digits.
void write_csv(const std::string& path, const Matrix& m);
void write_csv(std::ostream& out, const Matrix& m);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

/// {"d": int, "trunc": int, "matrix": [[int]]}
nlohmann::json structure_to_json(const StructureMatrix& m);
StructureMatrix structure_from_json(const nlohmann::json& j);

/// {"structure": ..., "edges": [{"a", "b", "cond", "family", "theta"}]}
nlohmann::json model_to_json(const XVineSpec& spec);
XVineSpec model_from_json(const nlohmann::json& j);

/// Model JSON plus per-edge diagnostics, "mbic", "q_star" and "errors".
nlohmann::json report_to_json(const FitReport& rep);

/// Parses text, mapping syntax errors to ErrorKind::Parse.
nlohmann::json parse_json(const std::string& text);

}  // namespace xvine
