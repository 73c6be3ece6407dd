#pragma once

#include "mblur/display_models.hpp"
#include "mblur/virtual_rig.hpp"

#include <string>

namespace mblur {

// Flat key-value config text: one `key = value` per line, '#' comments.
DisplayModel parse_display_model_config(const std::string& text,
                                        const std::string& source_name);
DisplayModel load_display_model_config(const std::string& path);

RigConfig parse_rig_config(const std::string& text,
                           const std::string& source_name);
RigConfig load_rig_config(const std::string& path);

// Canonical one-line parameter snapshots for manifests and sweep ids.
std::string describe(const DisplayModel& model);
std::string describe(const RigConfig& rig);

} // namespace mblur
