#include "qvertex/json_io.hpp"

#include <nlohmann/json.hpp>

#include <sstream>

namespace qv {

namespace {

nlohmann::json basis_json(const TensorBasis& b) {
    nlohmann::json sites = nlohmann::json::array();
    for (int x = 0; x < b.sites(); ++x) {
        nlohmann::json states = nlohmann::json::array();
        for (const auto& c : b.site(x).states) states.push_back(c);
        sites.push_back({{"level", b.level(x)}, {"states", states}});
    }
    return {{"species", b.species()}, {"sites", sites}, {"dim", b.dim()}};
}

}  // namespace

nlohmann::json operator_json(const LocalOperator& op, const nlohmann::json& params, bool float_mode) {
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t c = 0; c < op.mat.cols(); ++c)
        for (const auto& [r, v] : op.mat.col(c)) {
            nlohmann::json e{{"row", r}, {"col", c}};
            if (float_mode) {
                e["value"] = rat_double(v);
            } else {
                e["num"] = v.get_num().get_str();
                e["den"] = v.get_den().get_str();
            }
            entries.push_back(std::move(e));
        }
    return {{"schema_version", kSchemaVersion},
            {"params", params},
            {"basis_domain", basis_json(*op.domain)},
            {"basis_codomain", basis_json(*op.codomain)},
            {"entries", entries}};
}

std::string operator_csv(const LocalOperator& op, bool float_mode) {
    std::ostringstream os;
    auto t = op.mat.transpose();  // row-major walk
    for (std::size_t r = 0; r < op.mat.rows(); ++r) {
        for (std::size_t c = 0; c < op.mat.cols(); ++c) {
            if (c) os << ',';
            Rat v = t.get(c, r);
            if (float_mode)
                os << rat_double(v);
            else
                os << rat_str(v);
        }
        os << '\n';
    }
    return os.str();
}

nlohmann::json report_json(const std::string& check, const nlohmann::json& params, bool pass,
                           const std::string& max_abs_residual, const nlohmann::json& witnesses) {
    return {{"schema_version", kSchemaVersion}, {"check", check},       {"params", params},
            {"status", pass ? "pass" : "fail"}, {"max_abs_residual", max_abs_residual}, {"witnesses", witnesses}};
}

}  // namespace qv
