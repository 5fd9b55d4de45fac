#pragma once

#include "geosocial/error.hpp"
#include "geosocial/experiments.hpp"
#include "geosocial/graph.hpp"
#include "geosocial/io.hpp"
#include "geosocial/metrics.hpp"
#include "geosocial/model.hpp"
#include "geosocial/rankone.hpp"
#include "geosocial/spectral.hpp"
#include "geosocial/synthesis.hpp"
#include "geosocial/transport.hpp"

namespace geosocial {

const char* version() noexcept;

}  // namespace geosocial
