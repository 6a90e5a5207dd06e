#include "dpspin/fixtures.hpp"

#include "dpspin/bulk_density.hpp"
#include "dpspin/json_util.hpp"
#include "dpspin/surface_tension.hpp"

namespace dpspin {

namespace {

using nlohmann::json;

std::vector<std::int64_t> int_list(const json& v) {
  std::vector<std::int64_t> out;
  for (const auto& x : v) out.push_back(x.get<std::int64_t>());
  return out;
}

RationalVector rational_list(const json& v) {
  RationalVector out;
  for (const auto& x : v) out.push_back(x.is_string() ? parse_rational(x.get<std::string>()) : parse_rational(x.dump()));
  return out;
}

Rational compute(const json& check, const LatticeModel& model, const ConnectivitySummary& summary,
                 const SolveOptions& options, unsigned jobs) {
  const std::string kind = check.at("kind").get<std::string>();
  const auto sides = int_list(check.at("sides"));
  if (kind == "phi") {
    SpinVector z;
    for (const auto& s : check.at("z")) z.push_back(spin_from_int(s.get<long>()));
    return phi_estimate(model, summary, z, sides, options, jobs).estimate;
  }
  if (kind == "fhom")
    return fhom_estimate(model, summary, check.at("phase").get<int>(), rational_list(check.at("normal")), sides, jobs)
        .estimate;
  if (kind == "fhom_total") return fhom_total(model, summary, rational_list(check.at("normal")), sides, jobs);
  throw std::invalid_argument("unknown check kind '" + kind + "'");
}

}  // namespace

std::vector<ExampleCheck> run_examples(const std::string& fixture_dir, const SolveOptions& options, unsigned jobs) {
  const json doc = parse_json_strict(read_text_file(fixture_dir + "/expected.json"), "expected values");
  std::vector<ExampleCheck> out;
  for (const auto& check : doc.at("checks")) {
    ExampleCheck c;
    c.name = check.at("name").get<std::string>();
    c.fixture = check.at("fixture").get<std::string>();
    c.kind = check.at("kind").get<std::string>();
    c.formula = check.value("formula", "");
    c.expected = check.at("expected").get<std::string>();
    c.tolerance = check.at("tolerance").get<std::string>();
    try {
      const LatticeModel model = load_model(fixture_dir + "/" + c.fixture);
      const auto summary = classify(model);
      const Rational value = compute(check, model, summary, options, jobs);
      c.computed = format_rational(value);
      c.passed = abs(value - parse_rational(c.expected)) <= parse_rational(c.tolerance);
    } catch (const std::exception& e) {
      c.error = e.what();
      c.passed = false;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace dpspin
