#pragma once

#include "model.hpp"

namespace itsforge {

// Splits every data collection into dataset instances along its employee,
// service and software dimensions, links the resulting instances to the
// installations that hold or access them, and picks a primary store per
// instance. Fills m.instances.
void instantiate_datasets(ItsModel& m);

}  // namespace itsforge
