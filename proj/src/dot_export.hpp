#pragma once

#include <string>

#include "model.hpp"

namespace itsforge {

// Graphviz views of the model. Identically equipped computers, instances and
// credentials collapse into one node carrying a multiplicity, so the graphs
// stay readable at any organization size. Output is deterministic.
std::string landscape_dot(const ItsModel& m);   // segments and computer groups
std::string datasets_dot(const ItsModel& m);    // dataset instances and stores
std::string credentials_dot(const ItsModel& m); // credential groups and storage
std::string firewall_dot(const ItsModel& m);    // whitelist edges between groups

// Writes landscape.dot, datasets.dot, credentials.dot and firewall.dot.
void export_dot(const ItsModel& m, const std::string& dir);

}  // namespace itsforge
