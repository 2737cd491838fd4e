#pragma once

#include "vmesh/geom.hpp"

namespace vmesh::predicates {

// Exact-sign geometric predicates on double inputs. A floating-point filter
// with a forward error bound decides most calls; the rest are evaluated in
// exact rational arithmetic.

/// +1 if a, b, c are counter-clockwise, -1 if clockwise, 0 if collinear.
int orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

/// +1 if d lies strictly inside the circle through a, b, c (given counter-
/// clockwise), -1 if strictly outside, 0 if cocircular.
int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

}  // namespace vmesh::predicates
