#include "vmesh/delaunay.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include "vmesh/errors.hpp"
#include "vmesh/predicates.hpp"

namespace vmesh {
namespace {

using predicates::incircle;
using predicates::orient2d;

inline int next_edge(int e) { return e % 3 == 2 ? e - 2 : e + 1; }
inline int prev_edge(int e) { return e % 3 == 0 ? e + 2 : e - 1; }

// Half-edge triangulation: half-edge e starts at tri[e] and ends at tri[next_edge(e)];
// twin[e] is the opposite half-edge or -1 on the hull.
class Triangulator {
 public:
  Triangulator(std::span<const Vec2> pts, std::span<const VertexId> tie_ids)
      : pts_(pts), tie_ids_(tie_ids) {}

  std::vector<std::array<int, 3>> run() {
    const int n = static_cast<int>(pts_.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const Vec2& pa = pt(a);
      const Vec2& pb = pt(b);
      return pa.x() < pb.x() || (pa.x() == pb.x() && pa.y() < pb.y());
    });
    // Exact duplicates: keep the first occurrence in input order.
    std::vector<int> unique;
    unique.reserve(order.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      int keep = order[i];
      while (j < order.size() && pt(order[j]) == pt(order[i])) {
        keep = std::min(keep, order[j]);
        ++j;
      }
      unique.push_back(keep);
      i = j;
    }
    if (unique.size() < 3) throw DegenerateError("fewer than 3 distinct points");

    std::size_t k = 2;
    while (k < unique.size() && orient2d(pt(unique[0]), pt(unique[1]), pt(unique[k])) == 0) ++k;
    if (k == unique.size()) throw DegenerateError("all points collinear");

    hull_next_.assign(static_cast<std::size_t>(n), -1);
    hull_prev_.assign(static_cast<std::size_t>(n), -1);
    hull_tri_.assign(static_cast<std::size_t>(n), -1);
    tri_.reserve(static_cast<std::size_t>(6 * n));
    twin_.reserve(static_cast<std::size_t>(6 * n));

    seed_fan(unique, k);
    int last = unique[k];
    for (std::size_t i = k + 1; i < unique.size(); ++i) {
      insert_outside(unique[i], last);
      last = unique[i];
    }
    legalize_all();

    std::vector<std::array<int, 3>> out;
    out.reserve(tri_.size() / 3);
    for (std::size_t t = 0; t < tri_.size(); t += 3) out.push_back({tri_[t], tri_[t + 1], tri_[t + 2]});
    return out;
  }

 private:
  const Vec2& pt(int i) const { return pts_[static_cast<std::size_t>(i)]; }
  VertexId tie_id(int i) const {
    return tie_ids_.empty() ? static_cast<VertexId>(i) : tie_ids_[static_cast<std::size_t>(i)];
  }

  int add_triangle(int a, int b, int c, int ta, int tb, int tc) {
    const int e = static_cast<int>(tri_.size());
    tri_.insert(tri_.end(), {a, b, c});
    twin_.insert(twin_.end(), {-1, -1, -1});
    link(e, ta);
    link(e + 1, tb);
    link(e + 2, tc);
    return e;
  }

  void link(int a, int b) {
    twin_[static_cast<std::size_t>(a)] = b;
    if (b >= 0) twin_[static_cast<std::size_t>(b)] = a;
  }

  // Fan from the first non-collinear point over the leading collinear run.
  void seed_fan(const std::vector<int>& s, std::size_t k) {
    const int apex = s[k];
    const bool left = orient2d(pt(s[0]), pt(s[1]), pt(apex)) > 0;
    int shared = -1;  // half-edge on the apex-side edge of the previous triangle
    for (std::size_t i = 0; i + 1 < k; ++i) {
      const int a = s[i];
      const int b = s[i + 1];
      if (left) {
        // (a, b, apex): edges a->b, b->apex, apex->a; apex->a pairs with the previous b->apex.
        const int e = add_triangle(a, b, apex, -1, -1, shared);
        shared = e + 1;
      } else {
        // (b, a, apex): edges b->a, a->apex, apex->b; a->apex pairs with the previous apex->b.
        const int e = add_triangle(b, a, apex, -1, shared, -1);
        shared = e + 2;
      }
    }
    for (int e = 0; e < static_cast<int>(tri_.size()); ++e) {
      if (twin_[static_cast<std::size_t>(e)] != -1) continue;
      const int from = tri_[static_cast<std::size_t>(e)];
      const int to = tri_[static_cast<std::size_t>(next_edge(e))];
      hull_next_[static_cast<std::size_t>(from)] = to;
      hull_prev_[static_cast<std::size_t>(to)] = from;
      hull_tri_[static_cast<std::size_t>(from)] = e;
    }
  }

  bool visible(int v, int p) const {
    return orient2d(pt(v), pt(hull_next_[static_cast<std::size_t>(v)]), pt(p)) < 0;
  }

  // `p` is lexicographically beyond every inserted point, hence strictly outside the hull.
  void insert_outside(int p, int start_hint) {
    int v = start_hint;
    while (!visible(v, p)) {
      v = hull_next_[static_cast<std::size_t>(v)];
      if (v == start_hint) throw DegenerateError("sweep found no visible hull edge");
    }
    while (visible(hull_prev_[static_cast<std::size_t>(v)], p)) v = hull_prev_[static_cast<std::size_t>(v)];

    const int first = v;
    int shared = -1;
    int first_e = -1;
    int w = v;
    while (visible(w, p)) {
      const int nw = hull_next_[static_cast<std::size_t>(w)];
      // (nw, w, p): nw->w pairs with the hull edge w->nw, w->p with the previous p->w.
      const int e = add_triangle(nw, w, p, hull_tri_[static_cast<std::size_t>(w)], shared, -1);
      if (first_e < 0) first_e = e;
      shared = e + 2;
      if (w != first) hull_next_[static_cast<std::size_t>(w)] = hull_prev_[static_cast<std::size_t>(w)] = -1;
      w = nw;
    }
    const int last = w;
    hull_next_[static_cast<std::size_t>(first)] = p;
    hull_prev_[static_cast<std::size_t>(p)] = first;
    hull_next_[static_cast<std::size_t>(p)] = last;
    hull_prev_[static_cast<std::size_t>(last)] = p;
    hull_tri_[static_cast<std::size_t>(first)] = first_e + 1;
    hull_tri_[static_cast<std::size_t>(p)] = shared;
  }

  bool should_flip(int e) const {
    const int f = twin_[static_cast<std::size_t>(e)];
    if (f < 0) return false;
    const int a = tri_[static_cast<std::size_t>(e)];
    const int b = tri_[static_cast<std::size_t>(next_edge(e))];
    const int c = tri_[static_cast<std::size_t>(prev_edge(e))];
    const int d = tri_[static_cast<std::size_t>(prev_edge(f))];
    const int s = incircle(pt(a), pt(b), pt(c), pt(d));
    if (s > 0) return true;
    if (s < 0) return false;
    // Cocircular: prefer the diagonal with the smallest sorted id pair.
    return std::minmax(tie_id(c), tie_id(d)) < std::minmax(tie_id(a), tie_id(b));
  }

  void flip(int e, std::vector<int>& stack) {
    const int f = twin_[static_cast<std::size_t>(e)];
    const int al = next_edge(e);
    const int ar = prev_edge(e);
    const int br = next_edge(f);
    const int bl = prev_edge(f);
    const int c = tri_[static_cast<std::size_t>(ar)];
    const int d = tri_[static_cast<std::size_t>(bl)];
    const int twin_bl = twin_[static_cast<std::size_t>(bl)];
    const int twin_ar = twin_[static_cast<std::size_t>(ar)];
    tri_[static_cast<std::size_t>(e)] = d;
    tri_[static_cast<std::size_t>(f)] = c;
    link(e, twin_bl);
    link(f, twin_ar);
    link(ar, bl);
    stack.insert(stack.end(), {e, al, f, br});
  }

  void legalize_all() {
    std::vector<int> stack;
    stack.reserve(tri_.size());
    for (int e = 0; e < static_cast<int>(tri_.size()); ++e) {
      if (twin_[static_cast<std::size_t>(e)] > e) stack.push_back(e);
    }
    while (!stack.empty()) {
      const int e = stack.back();
      stack.pop_back();
      if (should_flip(e)) flip(e, stack);
    }
  }

  std::span<const Vec2> pts_;
  std::span<const VertexId> tie_ids_;
  std::vector<int> tri_;
  std::vector<int> twin_;
  std::vector<int> hull_next_;
  std::vector<int> hull_prev_;
  std::vector<int> hull_tri_;
};

}  // namespace

std::vector<std::array<int, 3>> delaunay_2d(std::span<const Vec2> points, std::span<const VertexId> tie_ids) {
  if (!tie_ids.empty() && tie_ids.size() != points.size()) {
    throw std::invalid_argument("delaunay_2d: tie_ids must match points in size");
  }
  for (const auto& p : points) {
    if (!p.allFinite()) throw std::invalid_argument("delaunay_2d: non-finite point");
  }
  return Triangulator(points, tie_ids).run();
}

}  // namespace vmesh
