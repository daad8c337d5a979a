#include "core/io.hpp"

#include <cmath>

namespace bm {

using nlohmann::json;

namespace {

const json& field(const json& doc, const char* key, const std::string& path) {
  if (!doc.is_object()) throw validation_error(path + ": expected an object");
  auto it = doc.find(key);
  if (it == doc.end()) throw validation_error(path + ": missing field '" + key + "'");
  return *it;
}

double number_at(const json& doc, const std::string& path) {
  if (!doc.is_number()) throw validation_error(path + ": expected a number");
  return doc.get<double>();
}

int int_at(const json& doc, const std::string& path) {
  if (!doc.is_number_integer()) throw validation_error(path + ": expected an integer");
  return doc.get<int>();
}

std::vector<double> number_array(const json& doc, const std::string& path) {
  if (!doc.is_array()) throw validation_error(path + ": expected an array");
  std::vector<double> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    out.push_back(number_at(doc[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace

Valuation valuation_from_json(const json& doc, const std::string& path) {
  const json& kind = field(doc, "kind", path);
  if (!kind.is_string()) throw validation_error(path + ".kind: expected a string");
  const std::string k = kind.get<std::string>();
  const json& values = field(doc, "values", path);
  try {
    if (k == "table") {
      auto vals = number_array(values, path + ".values");
      const double bits = std::log2(static_cast<double>(vals.size()));
      const int n = static_cast<int>(bits + 0.5);
      if (vals.size() < 2 || (std::size_t{1} << n) != vals.size()) {
        throw validation_error(path + ".values: table length must be a power of two");
      }
      return Valuation::table(n, std::move(vals));
    }
    if (k == "additive") return Valuation::additive(number_array(values, path + ".values"));
    if (k == "unitdemand") return Valuation::unit_demand(number_array(values, path + ".values"));
    if (k == "xos") {
      if (!values.is_array() || values.empty()) {
        throw validation_error(path + ".values: expected a nonempty array of clause arrays");
      }
      std::vector<std::vector<double>> clauses;
      clauses.reserve(values.size());
      for (std::size_t i = 0; i < values.size(); ++i) {
        clauses.push_back(number_array(values[i], path + ".values[" + std::to_string(i) + "]"));
      }
      const int n = static_cast<int>(clauses.front().size());
      return Valuation::xos(n, std::move(clauses));
    }
  } catch (const std::exception& e) {
    throw validation_error(path + ": " + e.what());
  }
  throw validation_error(path + ".kind: unknown valuation kind '" + k + "'");
}

json valuation_to_json(const Valuation& v) {
  json out;
  out["kind"] = to_string(v.kind());
  if (v.kind() == ValuationKind::Xos) {
    out["values"] = v.clauses();
  } else {
    out["values"] = v.values();
  }
  return out;
}

json lottery_to_json(const Lottery& lot) {
  json alloc = json::array();
  for (const auto& ws : lot.support()) {
    alloc.push_back(json{{"set", ws.set.members()}, {"prob", ws.prob}});
  }
  return json{{"allocation", alloc}, {"price", lot.price()}};
}

Menu menu_from_json(const json& doc, const std::string& path, double tol) {
  const json& sem = field(doc, "semantics", path);
  if (!sem.is_string()) throw validation_error(path + ".semantics: expected a string");
  Semantics semantics;
  const std::string s = sem.get<std::string>();
  if (s == "buyone") {
    semantics = Semantics::BuyOne;
  } else if (s == "buymany") {
    semantics = Semantics::BuyMany;
  } else {
    throw validation_error(path + ".semantics: expected 'buyone' or 'buymany'");
  }
  const json& entries = field(doc, "entries", path);
  if (!entries.is_array()) throw validation_error(path + ".entries: expected an array");
  std::vector<Lottery> lots;
  lots.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string epath = path + ".entries[" + std::to_string(i) + "]";
    const json& entry = entries[i];
    const json& alloc = field(entry, "allocation", epath);
    if (!alloc.is_array()) throw validation_error(epath + ".allocation: expected an array");
    std::vector<WeightedSet> support;
    support.reserve(alloc.size());
    for (std::size_t j = 0; j < alloc.size(); ++j) {
      const std::string apath = epath + ".allocation[" + std::to_string(j) + "]";
      const json& part = alloc[j];
      const json& set = field(part, "set", apath);
      if (!set.is_array()) throw validation_error(apath + ".set: expected an array of item indices");
      ItemSet items;
      for (std::size_t m = 0; m < set.size(); ++m) {
        const int idx = int_at(set[m], apath + ".set[" + std::to_string(m) + "]");
        try {
          items.insert(idx);
        } catch (const std::exception& e) {
          throw validation_error(apath + ".set: " + e.what());
        }
      }
      support.push_back({items, number_at(field(part, "prob", apath), apath + ".prob")});
    }
    const double price = number_at(field(entry, "price", epath), epath + ".price");
    try {
      lots.emplace_back(std::move(support), price, tol);
    } catch (const std::exception& e) {
      throw validation_error(epath + ": " + e.what());
    }
  }
  return Menu(std::move(lots), semantics);
}

json menu_to_json(const Menu& menu) {
  json entries = json::array();
  for (const auto& lot : menu.entries()) entries.push_back(lottery_to_json(lot));
  return json{{"semantics", to_string(menu.semantics())}, {"entries", entries}};
}

Instance load_instance(const json& doc, double tol) {
  Instance inst;
  inst.n = int_at(field(doc, "n", "$"), "$.n");
  if (inst.n < 1 || inst.n > ItemSet::kMaxItems) {
    throw validation_error("$.n: out of supported range");
  }
  const json& dist = field(doc, "distribution", "$");
  if (!dist.is_array() || dist.empty()) {
    throw validation_error("$.distribution: expected a nonempty array");
  }
  std::vector<TypeDistribution::Atom> atoms;
  atoms.reserve(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const std::string path = "$.distribution[" + std::to_string(i) + "]";
    const json& atom = dist[i];
    TypeDistribution::Atom a;
    a.prob = number_at(field(atom, "prob", path), path + ".prob");
    a.valuation = valuation_from_json(field(atom, "valuation", path), path + ".valuation");
    if (a.valuation.items() != inst.n) {
      throw validation_error(path + ".valuation: item count does not match n");
    }
    atoms.push_back(std::move(a));
  }
  try {
    inst.distribution = TypeDistribution(std::move(atoms), tol);
  } catch (const std::exception& e) {
    throw validation_error(std::string("$.distribution: ") + e.what());
  }
  inst.menu = menu_from_json(field(doc, "menu", "$"), "$.menu", tol);
  for (const auto& lot : inst.menu.entries()) {
    for (const auto& ws : lot.support()) {
      if (ws.set.max_item() >= inst.n) {
        throw validation_error("$.menu: allocation uses an item index >= n");
      }
    }
  }
  return inst;
}

Instance load_instance_text(const std::string& text, double tol) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw validation_error(std::string("invalid JSON: ") + e.what());
  }
  return load_instance(doc, tol);
}

json save_instance(const Instance& inst) {
  json dist = json::array();
  for (const auto& atom : inst.distribution.atoms()) {
    dist.push_back(json{{"prob", atom.prob}, {"valuation", valuation_to_json(atom.valuation)}});
  }
  return json{{"n", inst.n}, {"distribution", dist}, {"menu", menu_to_json(inst.menu)}};
}

}  // namespace bm
