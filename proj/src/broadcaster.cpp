#include "vmesh/broadcaster.hpp"

#include <algorithm>
#include <unordered_map>

namespace vmesh {

std::size_t Broadcaster::sync() {
  std::scoped_lock lock(map_.facet_mutex(), copy_mutex_);
  std::size_t copied = 0;
  for (auto& [key, region] : map_.regions()) {
    if (region.sync != SyncFlag::SyncRequired) continue;
    std::vector<FacetKey> keys(region.facets.begin(), region.facets.end());
    std::sort(keys.begin(), keys.end());
    std::vector<CopiedFacet> facets;
    facets.reserve(keys.size());
    for (const FacetKey& k : keys) {
      const TriangleFacet& f = *map_.find_facet(k);
      CopiedFacet c{f.published_order, {}, f.normal};
      for (int i = 0; i < 3; ++i) c.pos[static_cast<std::size_t>(i)] = map_.vertex(c.order[static_cast<std::size_t>(i)]).pos;
      facets.push_back(c);
    }
    if (facets.empty()) {
      copies_.erase(key);
    } else {
      copies_[key] = std::move(facets);
    }
    region.sync = SyncFlag::Synced;
    ++copied;
  }
  return copied;
}

MeshSnapshot Broadcaster::snapshot() {
  std::lock_guard lock(copy_mutex_);
  MeshSnapshot snap;
  snap.frame_counter = ++frame_counter_;

  std::vector<std::pair<VertexId, Point3>> verts;
  for (const auto& [key, facets] : copies_) {
    for (const auto& f : facets) {
      for (int i = 0; i < 3; ++i) verts.emplace_back(f.order[static_cast<std::size_t>(i)], f.pos[static_cast<std::size_t>(i)]);
    }
  }
  std::sort(verts.begin(), verts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  verts.erase(std::unique(verts.begin(), verts.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
              verts.end());

  std::unordered_map<VertexId, std::uint32_t> index;
  index.reserve(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) index.emplace(verts[i].first, static_cast<std::uint32_t>(i));
  for (const auto& [key, facets] : copies_) {
    for (const auto& f : facets) {
      MeshSnapshot::Face face;
      for (int i = 0; i < 3; ++i) face.indices[static_cast<std::size_t>(i)] = index.at(f.order[static_cast<std::size_t>(i)]);
      face.normal = f.normal;
      snap.faces.push_back(face);
    }
  }
  snap.vertices = std::move(verts);
  return snap;
}

void Broadcaster::start(std::chrono::milliseconds period) {
  if (worker_.joinable()) return;
  {
    std::lock_guard lock(stop_mutex_);
    stop_requested_ = false;
  }
  worker_ = std::thread([this, period] {
    std::unique_lock lock(stop_mutex_);
    while (!stop_requested_) {
      lock.unlock();
      sync();
      lock.lock();
      stop_cv_.wait_for(lock, period, [this] { return stop_requested_; });
    }
  });
}

void Broadcaster::stop() {
  {
    std::lock_guard lock(stop_mutex_);
    stop_requested_ = true;
  }
  stop_cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

}  // namespace vmesh
