#pragma once

#include "fieldgen/matcher/grid.hpp"

namespace fieldgen::matcher {

/// Discretized field divergences between two densities tabulated on the same
/// grid. Gradients are taken by central differences (one-sided at the
/// boundary), integrals by the trapezoid rule.
///
///   div_grad(p, q) = integral p |grad p - grad q|^2
///   div_id(p, q)   = integral p (p - q)^2
///
/// Both are >= 0 and vanish iff the tables agree (for strictly positive p).
double div_grad(const GridDensity& p, const GridDensity& q);
double div_id(const GridDensity& p, const GridDensity& q);

}  // namespace fieldgen::matcher
