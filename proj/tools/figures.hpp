#pragma once

#include <json.hpp>
#include <string>

namespace qwalk::figures {

// Writes every figure artifact (8 surface grid CSVs, 18 cut CSVs) plus
// manifest.json into out_dir; returns the manifest.
nlohmann::json reproduce_figures(const std::string& out_dir, int surface_res = 101,
                                 int cut_res = 201);

}  // namespace qwalk::figures
