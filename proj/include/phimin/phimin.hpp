#pragma once

#include "phimin/error.hpp"
#include "phimin/weight_profile.hpp"
#include "phimin/profile_curve.hpp"
#include "phimin/profile_solvers.hpp"
#include "phimin/geometry.hpp"
#include "phimin/surface_builder.hpp"
#include "phimin/calabi.hpp"
#include "phimin/weierstrass.hpp"
#include "phimin/bjorling.hpp"
#include "phimin/config.hpp"
#include "phimin/io.hpp"
