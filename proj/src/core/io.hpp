#pragma once

#include <string>

#include <json.hpp>

#include "core/model.hpp"

namespace bm {

// Instance document schema:
//   { "n": int,
//     "distribution": [ { "prob": float,
//                         "valuation": { "kind": "table|additive|unitdemand|xos",
//                                        "values": [...] } }, ... ],
//     "menu": { "semantics": "buyone|buymany",
//               "entries": [ { "allocation": [ { "set": [int,...],
//                                                "prob": float } ],
//                              "price": float } ] } }
// Table values are indexed by subset bitmask order; xos "values" is a list
// of clause arrays. Violations are reported with the offending path.
Instance load_instance(const nlohmann::json& doc, double tol = kTol);
Instance load_instance_text(const std::string& text, double tol = kTol);

nlohmann::json save_instance(const Instance& inst);

nlohmann::json valuation_to_json(const Valuation& v);
Valuation valuation_from_json(const nlohmann::json& doc, const std::string& path);

nlohmann::json lottery_to_json(const Lottery& lot);
nlohmann::json menu_to_json(const Menu& menu);
Menu menu_from_json(const nlohmann::json& doc, const std::string& path, double tol = kTol);

}  // namespace bm
