#include "lll/runtime.hpp"

// Header-only at the moment; this TU anchors the module in the build.
namespace lll {}
