#pragma once

#include <string>

#include "model.hpp"

namespace itsforge {

// Model <-> JSON. Serialization is canonical: the same model always produces
// byte-identical text.
std::string model_to_json(const ItsModel& m);
ItsModel model_from_json(const std::string& text);

void write_model(const ItsModel& m, const std::string& path);
ItsModel read_model(const std::string& path);

}  // namespace itsforge
