#pragma once

#include "staticpot/chart_geometry.hpp"
#include "staticpot/expression.hpp"
#include "staticpot/geodesic_growth.hpp"
#include "staticpot/global_identities.hpp"
#include "staticpot/pointwise_identities.hpp"
#include "staticpot/quadrature.hpp"
#include "staticpot/static_potentials.hpp"
#include "staticpot/zero_set_geometry.hpp"
