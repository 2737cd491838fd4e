#include "vmesh/predicates.hpp"

#include <cmath>
#include <limits>

#include <gmpxx.h>

namespace vmesh::predicates {
namespace {

constexpr double kEpsilon = std::numeric_limits<double>::epsilon() / 2.0;  // 2^-53
// Forward error bounds for the straightforward evaluation (Shewchuk 1997, bound "A").
constexpr double kOrientBound = (3.0 + 16.0 * kEpsilon) * kEpsilon;
constexpr double kIncircleBound = (10.0 + 96.0 * kEpsilon) * kEpsilon;

template <typename T>
int sign_of(const T& v) {
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

int orient2d_exact(const Vec2& a, const Vec2& b, const Vec2& c) {
  const mpq_class acx = mpq_class(a.x()) - mpq_class(c.x());
  const mpq_class bcx = mpq_class(b.x()) - mpq_class(c.x());
  const mpq_class acy = mpq_class(a.y()) - mpq_class(c.y());
  const mpq_class bcy = mpq_class(b.y()) - mpq_class(c.y());
  const mpq_class det = acx * bcy - acy * bcx;
  return sgn(det);
}

int incircle_exact(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const mpq_class dx(d.x()), dy(d.y());
  const mpq_class adx = mpq_class(a.x()) - dx, ady = mpq_class(a.y()) - dy;
  const mpq_class bdx = mpq_class(b.x()) - dx, bdy = mpq_class(b.y()) - dy;
  const mpq_class cdx = mpq_class(c.x()) - dx, cdy = mpq_class(c.y()) - dy;
  const mpq_class alift = adx * adx + ady * ady;
  const mpq_class blift = bdx * bdx + bdy * bdy;
  const mpq_class clift = cdx * cdx + cdy * cdy;
  const mpq_class det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                        clift * (adx * bdy - bdx * ady);
  return sgn(det);
}

}  // namespace

int orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double left = (a.x() - c.x()) * (b.y() - c.y());
  const double right = (a.y() - c.y()) * (b.x() - c.x());
  const double det = left - right;
  const double bound = kOrientBound * (std::abs(left) + std::abs(right));
  if (det > bound || -det > bound) return sign_of(det);
  if (left == 0.0 && right == 0.0) return 0;
  return orient2d_exact(a, b, c);
}

int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double alift = adx * adx + ady * ady;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double blift = bdx * bdx + bdy * bdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double clift = cdx * cdx + cdy * cdy;

  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                           (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  const double bound = kIncircleBound * permanent;
  if (det > bound || -det > bound) return sign_of(det);
  return incircle_exact(a, b, c, d);
}

}  // namespace vmesh::predicates
