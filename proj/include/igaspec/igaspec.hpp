#pragma once

// Isogeometric spectral approximation of the Dirichlet Laplacian on unit
// boxes with blended quadratures and boundary penalties.

#include "analysis.hpp"
#include "assembly.hpp"
#include "bspline.hpp"
#include "eigsolve.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "matrix.hpp"
#include "quadrature.hpp"
#include "tensor.hpp"
