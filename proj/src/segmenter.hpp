#pragma once

#include "model.hpp"

namespace itsforge {

// Finds the smallest number of network segments admitting an assignment of
// installations and dataset instances to segments that satisfies the network
// policies and the built-in placement rules, then greedily prunes redundant
// memberships and internet-facing flags. Fills m.segments and the segment_ids
// of installations and instances. Employees with identical software and data
// are solved once through a representative and the result is copied to the
// rest of their group.
void segment_network(ItsModel& m, const InputParameters& params);

}  // namespace itsforge
