#pragma once

#include <string>

#include "json.hpp"

#include "hirota/corpus.hpp"
#include "hirota/geometry.hpp"
#include "hirota/symplectic.hpp"

namespace hirota {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

// Common header echoed into every report: version, seed, tolerances,
// sampling counts.  Identical inputs give byte-identical serialization.
Json report_header(std::uint64_t seed, const VerdictConfig& cfg);

Json to_json(const Verdict& v);
Json to_json(const SymmetryResult& r);
Json to_json(const GeometryReport& g);
Json to_json(const EntryAnalysis& a);

// dump(2) with a trailing newline when as_json, otherwise a plain indented
// key/value rendering of the same object.
std::string render_report(const Json& j, bool as_json);

}  // namespace hirota
