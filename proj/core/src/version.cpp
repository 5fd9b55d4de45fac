#include "geosocial/geosocial.hpp"

const char* geosocial::version() noexcept { return GEOSOCIAL_VERSION; }
