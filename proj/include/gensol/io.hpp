#pragma once

// JSON certificates and reports. Infinity is written as {"inf": true}
// ({"inf": true, "negative": true} for -inf); NaN is rejected.

#include <string>
#include <variant>

#include "json.hpp"

#include "gensol/convert.hpp"

namespace gensol {

using Json = nlohmann::ordered_json;

/// Any of the three certificate kinds.
using Certificate = std::variant<EnVarCert, DissWeakCert, MVCert>;

std::string kind_name(const Certificate& c);

/// Throws InputError on schema violations (the message names the path).
Certificate certificate_from_json(const Json& j);
Json certificate_to_json(const Certificate& c);

Json number_to_json(double v);
double number_from_json(const Json& j, const std::string& where);

Json measure_to_json(const DiscMeasure& mu);
DiscMeasure measure_from_json(const Json& j, const Grid& g, WeightKind kind, const std::string& where);

Json report_to_json(const Report& r);

/// Reads and parses a file; InputError on I/O or parse failure.
Json read_json_file(const std::string& path);
/// Writes to path.tmp then renames over path.
void write_text_atomic(const std::string& path, const std::string& text);

}  // namespace gensol
