#include "dpspin/field_io.hpp"

#include "dpspin/json_util.hpp"

namespace dpspin {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what, const std::string& path, const std::string& message) {
  throw ModelParseError(what + " schema error at '" + path + "': " + message);
}

Rational to_rational(const json& value, const std::string& what, const std::string& path) {
  try {
    if (value.is_string()) return parse_rational(value.get<std::string>());
    if (value.is_number()) return parse_rational(value.dump());
  } catch (const std::invalid_argument& e) {
    fail(what, path, e.what());
  }
  fail(what, path, "expected a number or a rational string");
}

json rational_json(const Rational& r) {
  if (boost::multiprecision::denominator(r) == 1 && abs(r) < Rational(1LL << 52))
    return boost::multiprecision::numerator(r).convert_to<long long>();
  return format_rational(r);
}

RationalVector to_vector(const json& value, const std::string& what, const std::string& path) {
  if (!value.is_array()) fail(what, path, "expected an array");
  RationalVector v;
  for (std::size_t i = 0; i < value.size(); ++i)
    v.push_back(to_rational(value[i], what, path + "[" + std::to_string(i) + "]"));
  return v;
}

json vector_json(const RationalVector& v) {
  json a = json::array();
  for (const auto& c : v) a.push_back(rational_json(c));
  return a;
}

void only_fields(const json& object, std::initializer_list<const char*> allowed, const std::string& what,
                 const std::string& path) {
  if (!object.is_object()) fail(what, path, "expected an object");
  for (auto it = object.begin(); it != object.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) fail(what, path, "unknown field '" + it.key() + "'");
  }
}

const json& require(const json& object, const char* name, const std::string& what, const std::string& path) {
  auto it = object.find(name);
  if (it == object.end()) fail(what, path, std::string("missing field '") + name + "'");
  return *it;
}

DomainSpec to_domain(const json& value, const std::string& what) {
  only_fields(value, {"lo", "hi"}, what, "domain");
  DomainSpec d;
  d.lo = to_vector(require(value, "lo", what, "domain"), what, "domain.lo");
  d.hi = to_vector(require(value, "hi", what, "domain"), what, "domain.hi");
  try {
    d.check();
  } catch (const std::invalid_argument& e) {
    fail(what, "domain", e.what());
  }
  return d;
}

}  // namespace

nlohmann::json domain_to_json(const DomainSpec& domain) {
  return json{{"lo", vector_json(domain.lo)}, {"hi", vector_json(domain.hi)}};
}

SpinField parse_field(std::string_view document) {
  const std::string what = "field";
  const json doc = parse_json_strict(document, what);
  only_fields(doc, {"eps", "domain", "rle"}, what, "");
  SpinField f;
  f.eps = to_rational(require(doc, "eps", what, ""), what, "eps");
  if (f.eps <= 0) fail(what, "eps", "must be positive");
  f.domain = to_domain(require(doc, "domain", what, ""), what);
  f.sites = scaled_sites(f.domain, f.eps);
  const json& rle = require(doc, "rle", what, "");
  if (!rle.is_array()) fail(what, "rle", "expected an array of [spin, count] pairs");
  for (std::size_t i = 0; i < rle.size(); ++i) {
    const std::string path = "rle[" + std::to_string(i) + "]";
    const json& run = rle[i];
    if (!run.is_array() || run.size() != 2 || !run[0].is_number_integer() || !run[1].is_number_integer())
      fail(what, path, "expected [spin, count]");
    Spin s;
    try {
      s = spin_from_int(run[0].get<long>());
    } catch (const std::invalid_argument& e) {
      fail(what, path, e.what());
    }
    const long long count = run[1].get<long long>();
    if (count < 0 || f.values.size() + static_cast<std::size_t>(count) > f.sites.size())
      fail(what, path, "run length exceeds the number of sites " + std::to_string(f.sites.size()));
    f.values.insert(f.values.end(), static_cast<std::size_t>(count), s);
  }
  if (f.values.size() != f.sites.size())
    fail(what, "rle", "covers " + std::to_string(f.values.size()) + " of " + std::to_string(f.sites.size()) +
                          " sites");
  return f;
}

SpinField load_field(const std::string& path) { return parse_field(read_text_file(path)); }

std::string serialize_field(const SpinField& field) {
  json rle = json::array();
  for (std::size_t i = 0; i < field.values.size();) {
    std::size_t j = i;
    while (j < field.values.size() && field.values[j] == field.values[i]) ++j;
    rle.push_back(json::array({value(field.values[i]), j - i}));
    i = j;
  }
  json doc{{"eps", rational_json(field.eps)}, {"domain", domain_to_json(field.domain)}, {"rle", rle}};
  return doc.dump() + "\n";
}

MultiphaseTarget parse_target(std::string_view document) {
  const std::string what = "target";
  const json doc = parse_json_strict(document, what);
  only_fields(doc, {"domain", "phases"}, what, "");
  MultiphaseTarget t;
  t.domain = to_domain(require(doc, "domain", what, ""), what);
  const std::size_t d = t.domain.lo.size();
  const json& phases = require(doc, "phases", what, "");
  if (!phases.is_array() || phases.empty()) fail(what, "phases", "expected a nonempty array");
  for (std::size_t p = 0; p < phases.size(); ++p) {
    const std::string path = "phases[" + std::to_string(p) + "]";
    const json& ph = phases[p];
    only_fields(ph, {"slab", "boxes"}, what, path);
    if (ph.size() != 1) fail(what, path, "expected exactly one of 'slab' or 'boxes'");
    if (ph.contains("slab")) {
      const json& s = ph["slab"];
      only_fields(s, {"normal", "offset"}, what, path + ".slab");
      Slab slab;
      slab.normal = to_vector(require(s, "normal", what, path + ".slab"), what, path + ".slab.normal");
      slab.offset = to_rational(require(s, "offset", what, path + ".slab"), what, path + ".slab.offset");
      if (slab.normal.size() != d) fail(what, path + ".slab.normal", "wrong dimension");
      bool zero = true;
      for (const auto& c : slab.normal) zero = zero && c == 0;
      if (zero) fail(what, path + ".slab.normal", "must be nonzero");
      t.phases.emplace_back(slab);
    } else {
      const json& boxes = ph["boxes"];
      if (!boxes.is_array()) fail(what, path + ".boxes", "expected an array");
      BoxUnion u;
      for (std::size_t b = 0; b < boxes.size(); ++b) {
        const std::string bp = path + ".boxes[" + std::to_string(b) + "]";
        only_fields(boxes[b], {"lo", "hi"}, what, bp);
        AxisBox box;
        box.lo = to_vector(require(boxes[b], "lo", what, bp), what, bp + ".lo");
        box.hi = to_vector(require(boxes[b], "hi", what, bp), what, bp + ".hi");
        if (box.lo.size() != d || box.hi.size() != d) fail(what, bp, "wrong dimension");
        u.push_back(box);
      }
      t.phases.emplace_back(u);
    }
  }
  return t;
}

MultiphaseTarget load_target(const std::string& path) { return parse_target(read_text_file(path)); }

std::string serialize_target(const MultiphaseTarget& target) {
  json phases = json::array();
  for (const auto& p : target.phases) {
    if (const auto* slab = std::get_if<Slab>(&p)) {
      phases.push_back({{"slab", {{"normal", vector_json(slab->normal)}, {"offset", rational_json(slab->offset)}}}});
    } else {
      json boxes = json::array();
      for (const auto& b : std::get<BoxUnion>(p)) boxes.push_back({{"lo", vector_json(b.lo)}, {"hi", vector_json(b.hi)}});
      phases.push_back({{"boxes", boxes}});
    }
  }
  return json{{"domain", domain_to_json(target.domain)}, {"phases", phases}}.dump(2) + "\n";
}

}  // namespace dpspin
