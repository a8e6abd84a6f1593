#pragma once

#include "cpforce/atom.hpp"
#include "cpforce/constants.hpp"
#include "cpforce/csv.hpp"
#include "cpforce/dynamics.hpp"
#include "cpforce/errors.hpp"
#include "cpforce/force.hpp"
#include "cpforce/greens.hpp"
#include "cpforce/level_system.hpp"
#include "cpforce/material.hpp"
#include "cpforce/quadrature.hpp"
#include "cpforce/scenario.hpp"
#include "cpforce/summation.hpp"
#include "cpforce/thermal.hpp"
