#pragma once

#include "hyperlorentz/billiard.hpp"
#include "hyperlorentz/errors.hpp"
#include "hyperlorentz/flight.hpp"
#include "hyperlorentz/hypgeo.hpp"
#include "hyperlorentz/lab.hpp"
#include "hyperlorentz/obstacles.hpp"
#include "hyperlorentz/random.hpp"
#include "hyperlorentz/stats.hpp"
#include "hyperlorentz/trajectory.hpp"
