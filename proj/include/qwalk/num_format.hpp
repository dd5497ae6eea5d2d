#pragma once

#include <string>

namespace qwalk {

// All human-facing numeric output uses 12 significant digits. Values that
// must round-trip through text are quantized with round12 first, which makes
// format12 -> parse -> format12 the identity.
std::string format12(double x);
double round12(double x);

}  // namespace qwalk
