#ifndef DISLOSIM_DISLOSIM_HPP
#define DISLOSIM_DISLOSIM_HPP

#include "dislosim/analytic.hpp"
#include "dislosim/config.hpp"
#include "dislosim/continuum.hpp"
#include "dislosim/curves.hpp"
#include "dislosim/errors.hpp"
#include "dislosim/grid.hpp"
#include "dislosim/io.hpp"
#include "dislosim/measures.hpp"
#include "dislosim/mobility.hpp"
#include "dislosim/quadrature.hpp"
#include "dislosim/scenario.hpp"
#include "dislosim/spectral.hpp"
#include "dislosim/tensor.hpp"
#include "dislosim/test_functions.hpp"

#endif // DISLOSIM_DISLOSIM_HPP
