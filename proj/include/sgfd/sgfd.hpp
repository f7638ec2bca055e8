// Convenience umbrella: the whole library.
#pragma once

#include "sgfd/asymptotics.hpp"
#include "sgfd/cli.hpp"
#include "sgfd/common.hpp"
#include "sgfd/config.hpp"
#include "sgfd/decay_character.hpp"
#include "sgfd/fft.hpp"
#include "sgfd/field.hpp"
#include "sgfd/fitting.hpp"
#include "sgfd/grid.hpp"
#include "sgfd/io.hpp"
#include "sgfd/linear_continuum.hpp"
#include "sgfd/linear_grid.hpp"
#include "sgfd/quadrature.hpp"
#include "sgfd/radial_profile.hpp"
#include "sgfd/solver.hpp"
#include "sgfd/spectral_ops.hpp"
