#pragma once

#include "wbdg/quadrature.hpp"
#include "wbdg/legendre.hpp"
#include "wbdg/mesh.hpp"
#include "wbdg/basis.hpp"
#include "wbdg/euler.hpp"
#include "wbdg/field.hpp"
#include "wbdg/dg_operator.hpp"
#include "wbdg/equilibria.hpp"
#include "wbdg/well_balanced.hpp"
#include "wbdg/time_integrator.hpp"
#include "wbdg/limiter.hpp"
#include "wbdg/diagnostics.hpp"
#include "wbdg/snapshot.hpp"
#include "wbdg/runner.hpp"
#include "wbdg/config.hpp"
