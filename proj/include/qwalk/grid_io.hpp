#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "qwalk/fisher.hpp"
#include "qwalk/num_format.hpp"

namespace qwalk {

// CSV surface format, row-major (alpha outer, beta inner), display values,
// header `alpha,beta,value,tag`. Axes and values are 12-significant-digit
// quantized at grid construction, so emit -> parse is bit-exact.
void write_grid_csv(std::ostream& out, const Grid& grid);
Grid read_grid_csv(std::istream& in);  // quantity/placements/cap not in CSV

// Long format stacks several grids over shared axes with a leading
// `quantity` column; a `raw_value` column appears when any grid is capped.
void write_grids_csv_long(std::ostream& out, const std::vector<Grid>& grids);
std::vector<Grid> read_grids_csv_long(std::istream& in);

// JSON envelope: axes, raw values, tags, cap record, display copy when capped.
nlohmann::json grid_to_json(const Grid& grid);
Grid grid_from_json(const nlohmann::json& j);

}  // namespace qwalk
