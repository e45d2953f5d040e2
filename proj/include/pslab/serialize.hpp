#pragma once

#include <json.hpp>

#include "pslab/series.hpp"

namespace pslab {

// Series wire format: {mode, order, coefficients[]}, rationals as "p/q".
inline nlohmann::json to_json(const TruncatedSeries<Rational>& s) {
    nlohmann::json j;
    j["mode"] = "exact";
    j["order"] = s.order();
    auto& c = j["coefficients"] = nlohmann::json::array();
    for (int k = 0; k <= s.order(); ++k) c.push_back(s[k].str());
    return j;
}

inline nlohmann::json to_json(const TruncatedSeries<double>& s) {
    nlohmann::json j;
    j["mode"] = "float";
    j["order"] = s.order();
    auto& c = j["coefficients"] = nlohmann::json::array();
    for (int k = 0; k <= s.order(); ++k) c.push_back(s[k]);
    return j;
}

inline TruncatedSeries<Rational> exact_series_from_json(const nlohmann::json& j) {
    if (j.at("mode") != "exact") throw std::invalid_argument("series_from_json: mode mismatch (expected exact)");
    std::vector<Rational> c;
    for (const auto& v : j.at("coefficients")) c.push_back(Rational::from_string(v.get<std::string>()));
    if (static_cast<int>(c.size()) != j.at("order").get<int>() + 1)
        throw std::invalid_argument("series_from_json: order/coefficient mismatch");
    return TruncatedSeries<Rational>(std::move(c));
}

inline TruncatedSeries<double> float_series_from_json(const nlohmann::json& j) {
    if (j.at("mode") != "float") throw std::invalid_argument("series_from_json: mode mismatch (expected float)");
    std::vector<double> c;
    for (const auto& v : j.at("coefficients")) c.push_back(v.get<double>());
    if (static_cast<int>(c.size()) != j.at("order").get<int>() + 1)
        throw std::invalid_argument("series_from_json: order/coefficient mismatch");
    return TruncatedSeries<double>(std::move(c));
}

} // namespace pslab
