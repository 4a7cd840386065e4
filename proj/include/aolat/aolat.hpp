// Umbrella header.
#pragma once

#include "aolat/cohomology.hpp"
#include "aolat/complex.hpp"
#include "aolat/energy.hpp"
#include "aolat/forms.hpp"
#include "aolat/fourier.hpp"
#include "aolat/gibbs.hpp"
#include "aolat/grains.hpp"
#include "aolat/hodge.hpp"
#include "aolat/io.hpp"
#include "aolat/lattice.hpp"
#include "aolat/poincare.hpp"
#include "aolat/vec.hpp"
