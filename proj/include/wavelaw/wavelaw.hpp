#pragma once

#include "wavelaw/grid.hpp"
#include "wavelaw/spectral.hpp"
#include "wavelaw/potential.hpp"
#include "wavelaw/dynamics.hpp"
#include "wavelaw/test_functions.hpp"
#include "wavelaw/audit.hpp"
#include "wavelaw/scenarios.hpp"
#include "wavelaw/dispersion.hpp"
#include "wavelaw/config.hpp"
#include "wavelaw/io.hpp"
#include "wavelaw/runner.hpp"
