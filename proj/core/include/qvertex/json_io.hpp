#pragma once

#include "qvertex/op.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>

namespace qv {

inline constexpr int kSchemaVersion = 1;

// { schema_version, params, basis_domain, basis_codomain, entries: [...] }
// with rationals as decimal integer strings; float mode stores doubles.
nlohmann::json operator_json(const LocalOperator& op, const nlohmann::json& params, bool float_mode);

// Dense CSV of the full matrix, one codomain row per line.
std::string operator_csv(const LocalOperator& op, bool float_mode);

nlohmann::json report_json(const std::string& check, const nlohmann::json& params, bool pass,
                           const std::string& max_abs_residual, const nlohmann::json& witnesses);

}  // namespace qv
