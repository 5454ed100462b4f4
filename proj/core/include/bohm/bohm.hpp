#pragma once

#include "bohm/conditions.hpp"
#include "bohm/current.hpp"
#include "bohm/dopri5.hpp"
#include "bohm/ensemble.hpp"
#include "bohm/equivariance.hpp"
#include "bohm/fft.hpp"
#include "bohm/field.hpp"
#include "bohm/field_io.hpp"
#include "bohm/geometry.hpp"
#include "bohm/grid.hpp"
#include "bohm/hardy.hpp"
#include "bohm/numerics.hpp"
#include "bohm/propagate.hpp"
#include "bohm/providers.hpp"
#include "bohm/scenario.hpp"
#include "bohm/trajectory.hpp"
#include "bohm/types.hpp"
