#pragma once

#include <string>
#include <vector>

#include "model.hpp"

namespace itsforge {

struct Violation {
  std::string code;
  std::string message;
};

// Checks a model against the parameters it was generated from, re-deriving
// every consistency requirement from the raw model data: structural
// integrity, dependency closure and hardware quotas per computer, the network
// policies and built-in placement rules, dataset instance construction,
// service support, credentials and the firewall whitelist. Returns one entry
// per violation; an empty result means the model is internally consistent.
std::vector<Violation> verify(const ItsModel& m, const InputParameters& params);

std::string violations_text(const std::vector<Violation>& violations);

}  // namespace itsforge
