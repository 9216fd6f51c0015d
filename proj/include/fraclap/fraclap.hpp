#pragma once

#include "fraclap/grid.hpp"
#include "fraclap/fields.hpp"
#include "fraclap/operators.hpp"
#include "fraclap/mobility.hpp"
#include "fraclap/params.hpp"
#include "fraclap/stationary.hpp"
#include "fraclap/evolution.hpp"
