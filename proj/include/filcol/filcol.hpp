#pragma once

#include "analysis.hpp"
#include "collision.hpp"
#include "dynamics.hpp"
#include "error.hpp"
#include "integrator.hpp"
#include "roots.hpp"
#include "types.hpp"
