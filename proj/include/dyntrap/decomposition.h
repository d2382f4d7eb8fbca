#pragma once

#include <vector>

#include "dyntrap/geometry.h"

namespace dyntrap {

/// Brute-force trapezoidal decomposition of a segment set by a slab sweep
/// over all endpoints and crossings. Quadratic in the input; meant as a
/// reference for the search structures.
std::vector<Trapezoid> decompose(const std::vector<const Segment*>& segments);

/// Number of properly crossing pairs, by exhaustive pair tests.
std::size_t count_crossings(const std::vector<const Segment*>& segments);

/// Index of the face containing the whole of `region`, or -1. Faces come
/// from decompose(); the region must be bounded by the same top and bottom.
int enclosing_face(const std::vector<Trapezoid>& faces, const Trapezoid& region);

}  // namespace dyntrap
