#pragma once

#include "adnplan/config.hpp"
#include "adnplan/dispatch.hpp"
#include "adnplan/economics.hpp"
#include "adnplan/ibpso.hpp"
#include "adnplan/plan.hpp"
#include "adnplan/planner.hpp"
#include "adnplan/prob_sequence.hpp"
#include "adnplan/radial_grid.hpp"
#include "adnplan/scenarios.hpp"
#include "adnplan/storage.hpp"
#include "adnplan/uncertainty.hpp"
