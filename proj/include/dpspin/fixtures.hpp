#pragma once

// Bundled example suite: expected.json lists closed-form values for the fixture
// models; run_examples recomputes each one and compares.

#include "dpspin/ground_state.hpp"

#include <string>
#include <vector>

namespace dpspin {

struct ExampleCheck {
  std::string name;
  std::string fixture;
  std::string kind;  // phi, fhom or fhom_total
  std::string formula;
  std::string expected;
  std::string computed;
  std::string tolerance;
  bool passed = false;
  std::string error;
};

std::vector<ExampleCheck> run_examples(const std::string& fixture_dir, const SolveOptions& options = {},
                                       unsigned jobs = 1);

}  // namespace dpspin
