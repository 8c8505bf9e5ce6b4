#pragma once

#include "dyadic/cylinder.hpp"
#include "dyadic/equidecompose.hpp"
#include "dyadic/error.hpp"
#include "dyadic/json_io.hpp"
#include "dyadic/orbit_census.hpp"
#include "dyadic/perm.hpp"
#include "dyadic/rational.hpp"
#include "dyadic/selftest.hpp"
#include "dyadic/step_fn.hpp"
#include "dyadic/table_map.hpp"
#include "dyadic/word.hpp"
