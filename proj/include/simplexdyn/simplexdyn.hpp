#pragma once

#include "simplexdyn/analysis.hpp"
#include "simplexdyn/certify.hpp"
#include "simplexdyn/core.hpp"
#include "simplexdyn/dynamics.hpp"
#include "simplexdyn/errors.hpp"
#include "simplexdyn/fixedpoint.hpp"
#include "simplexdyn/model.hpp"
#include "simplexdyn/tolerances.hpp"
