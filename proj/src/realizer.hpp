#pragma once

#include "model.hpp"

namespace itsforge {

// Turns the abstract installation plan into concrete computers: shards
// serving installations into replicas sized by their per-client quota, packs
// installations onto workstations and servers within the hardware budget, and
// copies dependency-only software onto every computer that needs it. Updates
// installations (computer ids, replicas, copies), dataset instance links and
// fills m.computers.
void install_computers(ItsModel& m, const InputParameters& params);

// Creates credentials: a privileged local root account per computer, domain
// or local accounts per employee, service accounts for server software that
// stores user accounts, and one privileged domain administrator when a domain
// controller exists. Fills m.credentials.
void init_authentication(ItsModel& m);

// Derives the firewall whitelist under a default-deny policy: internet to
// service-supporting installations, internet-requiring installations out,
// clients to their assigned serving replicas across segments, and
// domain-joined software to the domain controller. Fills m.firewall_rules.
void init_firewall(ItsModel& m, const InputParameters& params);

}  // namespace itsforge
