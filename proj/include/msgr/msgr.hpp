#pragma once

// Umbrella header.

#include "msgr/errors.hpp"
#include "msgr/indexing.hpp"
#include "msgr/taylor.hpp"
#include "msgr/dual.hpp"
#include "msgr/jet_space.hpp"
#include "msgr/geometry.hpp"
#include "msgr/exterior.hpp"
#include "msgr/eh_model.hpp"
#include "msgr/ep_model.hpp"
#include "msgr/expression.hpp"
#include "msgr/catalog.hpp"
#include "msgr/report.hpp"
