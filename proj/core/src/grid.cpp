#include "contlab/grid.hpp"

// GridSpec is header-only; this translation unit anchors the module.
namespace contlab {}
