#pragma once

#include "io.hpp"
#include "model.hpp"

namespace itsforge {

// One variant per template per combination of concrete matches of its
// requires_local_software regexes against the catalog. Throws
// UnsatisfiableDependency when a slot matches no template.
std::vector<SoftwareVariant> expand_variants(const std::vector<SoftwareTemplate>& templates);

// Cost-minimal software selection. Fills m.variants, m.employees, m.services
// and m.installations (workstation patterns per employee plus one server
// installation per server-active variant), and assigns supporting
// installations to every provided service. The selection minimizes
//   sum_v  w_h*hq_v*nn_v + (lc0+oc0)_v*n0_v + (lcn+ocn)_v*(nn_v - n0_v)
// where nn_v counts installations of v and n0_v flags any use of v.
void choose_software(ItsModel& m, const TemplateCatalog& catalog,
                     const InputParameters& params);

}  // namespace itsforge
