#pragma once

#include <utility>

#include "parea/grid.hpp"
#include "parea/measure.hpp"
#include "parea/numerics.hpp"
#include "parea/variation.hpp"

namespace parea {

// Random (mu, nu) on a shared complex of `cells` cells, with atoms on
// overlapping site sets. Densities are uniform in [-1, 1] per component.
std::pair<VectorMeasure, VectorMeasure> random_measure_pair(Rng& rng, int d, int cells, int atoms);

// Same, but cell 0 and the first atom satisfy mu = -eps*nu exactly, so eps is
// singular. eps is dyadic so the cancellation is exact in floating point.
std::pair<VectorMeasure, VectorMeasure> random_singular_pair(Rng& rng, int d, int cells, int atoms, double eps);

// Smooth field: low-order trigonometric sum plus a random affine part.
ScalarField random_smooth_field(const GridDomain& dom, Rng& rng, int modes = 3, double amplitude = 1.0);

// Sum of sine modes vanishing on the boundary; boundary nodes are set to 0.
DirectionField random_direction(const GridDomain& dom, Rng& rng, int modes = 3);

}  // namespace parea
