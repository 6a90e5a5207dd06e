#include "dpspin/json_util.hpp"
#include "dpspin/model.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dpspin {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ModelParseError("model schema error at '" + path + "': " + message);
}

const json& require(const json& object, const char* name, const std::string& path) {
  auto it = object.find(name);
  if (it == object.end()) fail(path, std::string("missing field '") + name + "'");
  return *it;
}

int require_int(const json& value, const std::string& path, int min_value) {
  if (!value.is_number_integer()) fail(path, "expected an integer");
  auto v = value.get<long long>();
  if (v < min_value || v > 1'000'000) fail(path, "integer " + std::to_string(v) + " out of range");
  return static_cast<int>(v);
}

Rational require_rational(const json& value, const std::string& path) {
  try {
    if (value.is_string()) return parse_rational(value.get<std::string>());
    if (value.is_number_integer()) return Rational(value.get<long long>());
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  fail(path, "expected a decimal string");
}

Vec parse_residue_key(const std::string& key, const ResidueSpace& rs, const std::string& path) {
  Vec v{};
  int count = 0;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (count >= rs.dimension()) fail(path, "residue key '" + key + "' has too many coordinates");
    try {
      std::size_t used = 0;
      long long c = std::stoll(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      if (c < 0 || c >= rs.period())
        fail(path, "residue coordinate " + part + " outside [0," + std::to_string(rs.period()) + ")");
      v[count++] = c;
    } catch (const std::logic_error&) {
      fail(path, "malformed residue key '" + key + "'");
    }
  }
  if (count != rs.dimension())
    fail(path, "residue key '" + key + "' needs " + std::to_string(rs.dimension()) + " coordinates");
  return v;
}

Vec parse_offset(const json& value, int dimension, const std::string& path) {
  if (!value.is_array()) fail(path, "offset must be an integer array");
  if (static_cast<int>(value.size()) != dimension)
    fail(path, "offset has arity " + std::to_string(value.size()) + ", expected " + std::to_string(dimension));
  Vec v{};
  for (int i = 0; i < dimension; ++i) {
    if (!value[static_cast<std::size_t>(i)].is_number_integer()) fail(path, "offset entries must be integers");
    v[i] = value[static_cast<std::size_t>(i)].get<std::int64_t>();
  }
  return v;
}

void parse_bonds(const json& doc, const char* name, BondKind kind, LatticeModel& model) {
  auto it = doc.find(name);
  if (it == doc.end()) return;
  if (!it->is_array()) fail(name, "expected an array");
  for (std::size_t n = 0; n < it->size(); ++n) {
    const std::string path = std::string(name) + "[" + std::to_string(n) + "]";
    const json& entry = (*it)[n];
    if (!entry.is_object()) fail(path, "expected an object");
    const json& from = require(entry, "from", path);
    if (!from.is_string()) fail(path + ".from", "expected a residue key string");
    const Vec residue = parse_residue_key(from.get<std::string>(), model.residues(), path + ".from");
    const Vec offset = parse_offset(require(entry, "offset", path), model.dimension(), path + ".offset");
    const Rational weight = require_rational(require(entry, "weight", path), path + ".weight");
    try {
      model.add_bond(kind, model.residues().index(residue), offset, weight);
    } catch (const std::invalid_argument& e) {
      fail(path, e.what());
    }
  }
}

}  // namespace

json parse_json_strict(std::string_view document, const std::string& what) {
  // nlohmann keeps the last of duplicate keys silently; track keys per open object instead.
  std::vector<std::set<std::string>> open_objects;
  auto callback = [&](int, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
        open_objects.emplace_back();
        break;
      case json::parse_event_t::object_end:
        if (!open_objects.empty()) open_objects.pop_back();
        break;
      case json::parse_event_t::key: {
        const auto key = parsed.get<std::string>();
        if (!open_objects.empty() && !open_objects.back().insert(key).second)
          throw ModelParseError(what + ": duplicate key '" + key + "'");
        break;
      }
      default:
        break;
    }
    return true;
  };
  try {
    return json::parse(document.begin(), document.end(), callback);
  } catch (const json::parse_error& e) {
    throw ModelParseError(what + ": " + e.what());
  }
}

LatticeModel parse_model(std::string_view document) {
  const json doc = parse_json_strict(document, "model");
  if (!doc.is_object()) fail("", "document must be a JSON object");

  const int d = require_int(require(doc, "dimension", ""), "dimension", 1);
  if (d > kMaxDimension) fail("dimension", "at most " + std::to_string(kMaxDimension) + " supported");
  const int T = require_int(require(doc, "period", ""), "period", 1);
  const int N = require_int(require(doc, "num_phases", ""), "num_phases", 1);
  LatticeModel model(d, T, N);
  const auto& rs = model.residues();

  const json& labels = require(doc, "labels", "");
  if (!labels.is_object()) fail("labels", "expected an object keyed by residue");
  std::vector<char> seen(rs.size(), 0);
  for (const auto& [key, value] : labels.items()) {
    const std::string path = "labels." + key;
    const std::size_t r = rs.index(parse_residue_key(key, rs, path));
    if (seen[r]) fail(path, "duplicate residue key (same residue as an earlier key)");
    seen[r] = 1;
    if (!value.is_number_integer()) fail(path, "label must be an integer");
    model.set_label(r, value.get<int>());
  }
  for (std::size_t r = 0; r < rs.size(); ++r)
    if (!seen[r]) fail("labels", "missing residue " + rs.key(r));

  parse_bonds(doc, "strong_bonds", BondKind::Strong, model);
  parse_bonds(doc, "weak_bonds", BondKind::Weak, model);

  if (auto it = doc.find("forcing"); it != doc.end()) {
    if (!it->is_object()) fail("forcing", "expected an object keyed by residue");
    std::vector<char> seen_forcing(rs.size(), 0);
    for (const auto& [key, value] : it->items()) {
      const std::string path = "forcing." + key;
      const std::size_t r = rs.index(parse_residue_key(key, rs, path));
      if (seen_forcing[r]) fail(path, "duplicate residue key (same residue as an earlier key)");
      seen_forcing[r] = 1;
      if (!value.is_object()) fail(path, "expected {plus, minus}");
      Forcing f;
      f.plus = require_rational(require(value, "plus", path), path + ".plus");
      f.minus = require_rational(require(value, "minus", path), path + ".minus");
      model.set_forcing(r, f);
    }
  }
  for (const auto& [key, value] : doc.items()) {
    static const std::set<std::string> known{"dimension", "period",     "num_phases", "labels",
                                             "strong_bonds", "weak_bonds", "forcing",  "description"};
    if (!known.count(key)) fail(key, "unknown field");
    (void)value;
  }
  return model;
}

LatticeModel load_model(const std::string& path) { return parse_model(read_text_file(path)); }

std::string serialize_model(const LatticeModel& model) {
  const auto& rs = model.residues();
  json doc;
  doc["dimension"] = model.dimension();
  doc["period"] = model.period();
  doc["num_phases"] = model.num_phases();
  json labels = json::object();
  json forcing = json::object();
  json strong = json::array();
  json weak = json::array();
  auto offset_json = [&](const Vec& v) {
    json a = json::array();
    for (int i = 0; i < model.dimension(); ++i) a.push_back(v[i]);
    return a;
  };
  for (std::size_t r = 0; r < rs.size(); ++r) {
    labels[rs.key(r)] = model.label(r);
    const auto& f = model.forcing(r);
    if (f.plus != 0 || f.minus != 0)
      forcing[rs.key(r)] = {{"plus", format_rational(f.plus)}, {"minus", format_rational(f.minus)}};
    for (const auto& b : model.strong_bonds(r))
      strong.push_back({{"from", rs.key(r)}, {"offset", offset_json(b.offset)}, {"weight", format_rational(b.weight)}});
    for (const auto& b : model.weak_bonds(r))
      weak.push_back({{"from", rs.key(r)}, {"offset", offset_json(b.offset)}, {"weight", format_rational(b.weight)}});
  }
  doc["labels"] = labels;
  doc["strong_bonds"] = strong;
  doc["weak_bonds"] = weak;
  doc["forcing"] = forcing;
  return doc.dump(2);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dpspin
