#include "triangulation.hpp"

#include "vvfrac/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace vvfrac::detail {

namespace {

struct Tri {
  std::array<int, 3> v{};
  std::array<int, 3> n{-1, -1, -1};  // n[i] is across the edge opposite v[i]
  bool alive = true;
};

class Mesher {
 public:
  explicit Mesher(const TriangulationInput& in) : in_(in) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& p : in.points) {
      xmin = std::min(xmin, p.x());
      xmax = std::max(xmax, p.x());
      ymin = std::min(ymin, p.y());
      ymax = std::max(ymax, p.y());
    }
    Vec2 c(0.5 * (xmin + xmax), 0.5 * (ymin + ymax));
    scale_ = std::max(xmax - xmin, ymax - ymin);
    double r = 50.0 * scale_;
    P_.push_back(c + Vec2(-r, -r));
    P_.push_back(c + Vec2(r, -r));
    P_.push_back(c + Vec2(0.0, r));
    T_.push_back(Tri{{0, 1, 2}});
    vtri_ = {0, 0, 0};
  }

  TriangulationOutput run() {
    for (const auto& p : in_.points) insert(p);
    segs_ = in_.segments;
    for (auto& s : segs_) {
      s.a += 3;
      s.b += 3;
    }
    for (int pass = 0;; ++pass) {
      recover_segments();
      refine();
      if (all_segments_present()) break;
      if (pass > 50) throw MeshingError("segment recovery did not converge");
    }
    return output();
  }

 private:
  const TriangulationInput& in_;
  std::vector<Vec2> P_;
  std::vector<Tri> T_;
  std::vector<int> vtri_;
  std::vector<Segment> segs_;
  std::deque<int> queue_;
  std::vector<int> stamp_;
  int epoch_ = 0;
  int last_ = 0;
  double scale_ = 1.0;

  bool is_super(int v) const { return v < 3; }

  bool inside(int t) const {
    const auto& tr = T_[t];
    if (is_super(tr.v[0]) || is_super(tr.v[1]) || is_super(tr.v[2])) return false;
    Vec2 c = (P_[tr.v[0]] + P_[tr.v[1]] + P_[tr.v[2]]) / 3.0;
    return in_.domain->contains(c);
  }

  int locate(const Vec2& p) {
    int t = last_;
    if (!T_[t].alive) {
      for (t = static_cast<int>(T_.size()) - 1; t >= 0 && !T_[t].alive; --t) {
      }
    }
    std::size_t limit = 4 * T_.size() + 100;
    int rot = 0;
    for (std::size_t step = 0; step < limit; ++step) {
      const auto& tr = T_[t];
      bool moved = false;
      for (int k = 0; k < 3; ++k) {
        int i = (k + rot) % 3;
        int a = tr.v[(i + 1) % 3], b = tr.v[(i + 2) % 3];
        if (orient2d(P_[a], P_[b], p) < 0.0) {
          if (tr.n[i] < 0) throw MeshingError("point outside the bounding triangle");
          t = tr.n[i];
          moved = true;
          break;
        }
      }
      rot = (rot + 1) % 3;
      if (!moved) return t;
    }
    // walk failed to settle because of round-off: scan
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < static_cast<int>(T_.size()); ++s) {
      if (!T_[s].alive) continue;
      const auto& tr = T_[s];
      double m = std::numeric_limits<double>::infinity();
      for (int i = 0; i < 3; ++i)
        m = std::min(m, orient2d(P_[tr.v[(i + 1) % 3]], P_[tr.v[(i + 2) % 3]], p));
      if (m > best_score) {
        best_score = m;
        best = s;
      }
    }
    return best;
  }

  bool in_circle(int t, const Vec2& p) const {
    const auto& tr = T_[t];
    return incircle(P_[tr.v[0]], P_[tr.v[1]], P_[tr.v[2]], p) > 0.0;
  }

  int insert(const Vec2& p) {
    if (P_.size() >= in_.max_points + 3) throw MeshingError("mesh point budget exhausted");
    int t0 = locate(p);
    for (int i = 0; i < 3; ++i)
      if ((P_[T_[t0].v[i]] - p).norm() <= 1e-13 * scale_) return T_[t0].v[i];
    int pi = static_cast<int>(P_.size());
    P_.push_back(p);
    vtri_.push_back(-1);

    std::vector<int> cavity{t0};
    ++epoch_;
    stamp_.resize(T_.size(), 0);
    auto is_marked = [&](int t) { return stamp_[t] == epoch_; };
    stamp_[t0] = epoch_;
    for (std::size_t k = 0; k < cavity.size(); ++k) {
      const auto& tr = T_[cavity[k]];
      for (int i = 0; i < 3; ++i) {
        int nb = tr.n[i];
        if (nb >= 0 && !is_marked(nb) && in_circle(nb, p)) {
          stamp_[nb] = epoch_;
          cavity.push_back(nb);
        }
      }
    }
    // make the cavity star-shaped with respect to p
    for (int guard = 0;; ++guard) {
      if (guard > 1000) throw MeshingError("cavity repair failed");
      bool changed = false;
      for (std::size_t k = 0; k < cavity.size() && !changed; ++k) {
        int t = cavity[k];
        const auto& tr = T_[t];
        for (int i = 0; i < 3; ++i) {
          int nb = tr.n[i];
          if (nb >= 0 && is_marked(nb)) continue;
          int a = tr.v[(i + 1) % 3], b = tr.v[(i + 2) % 3];
          if (orient2d(P_[a], P_[b], p) > 1e-14 * scale_ * scale_) continue;
          if (t == t0 || nb < 0) {
            if (nb < 0) throw MeshingError("degenerate insertion at the hull");
            stamp_[nb] = epoch_;
            cavity.push_back(nb);
          } else {
            stamp_[t] = 0;
            cavity.erase(cavity.begin() + static_cast<long>(k));
            // keep only the part connected to t0
            std::vector<int> keep{t0};
            for (std::size_t q = 0; q < keep.size(); ++q)
              for (int j = 0; j < 3; ++j) {
                int nn = T_[keep[q]].n[j];
                if (nn >= 0 && is_marked(nn) &&
                    std::find(keep.begin(), keep.end(), nn) == keep.end())
                  keep.push_back(nn);
              }
            for (int c : cavity) stamp_[c] = 0;
            for (int c : keep) stamp_[c] = epoch_;
            cavity = keep;
          }
          changed = true;
          break;
        }
      }
      if (!changed) break;
    }

    struct BEdge {
      int a, b, outer, outer_edge;
    };
    std::vector<BEdge> boundary;
    for (int t : cavity) {
      const auto& tr = T_[t];
      for (int i = 0; i < 3; ++i) {
        int nb = tr.n[i];
        if (nb >= 0 && is_marked(nb)) continue;
        int oe = -1;
        if (nb >= 0)
          for (int j = 0; j < 3; ++j)
            if (T_[nb].n[j] == t) oe = j;
        boundary.push_back({tr.v[(i + 1) % 3], tr.v[(i + 2) % 3], nb, oe});
      }
    }
    for (int t : cavity) T_[t].alive = false;

    std::vector<int> created;
    std::vector<std::pair<int, int>> by_start, by_end;  // vertex -> new triangle
    for (const auto& e : boundary) {
      int id = static_cast<int>(T_.size());
      Tri nt;
      nt.v = {e.a, e.b, pi};
      nt.n = {-1, -1, e.outer};
      T_.push_back(nt);
      if (e.outer >= 0) T_[e.outer].n[e.outer_edge] = id;
      by_start.emplace_back(e.a, id);
      by_end.emplace_back(e.b, id);
      created.push_back(id);
    }
    auto lookup = [](const std::vector<std::pair<int, int>>& m, int v) {
      for (const auto& [k, id] : m)
        if (k == v) return id;
      throw MeshingError("cavity boundary is not a simple cycle");
    };
    for (int id : created) {
      auto& tr = T_[id];
      // edge opposite v[0] is (b, p): shared with the triangle starting at b
      tr.n[0] = lookup(by_start, tr.v[1]);
      // edge opposite v[1] is (p, a): shared with the triangle ending at a
      tr.n[1] = lookup(by_end, tr.v[0]);
      for (int i = 0; i < 3; ++i) vtri_[tr.v[i]] = id;
    }
    last_ = created.front();
    for (int id : created) queue_.push_back(id);
    return pi;
  }

  bool has_edge(int a, int b) const {
    int t0 = vtri_[a];
    int t = t0;
    for (std::size_t guard = 0; guard < 10000; ++guard) {
      const auto& tr = T_[t];
      int k = tr.v[0] == a ? 0 : tr.v[1] == a ? 1 : 2;
      if (tr.v[(k + 1) % 3] == b || tr.v[(k + 2) % 3] == b) return true;
      t = tr.n[(k + 1) % 3];
      if (t < 0 || t == t0) return false;
    }
    return false;
  }

  // Splits subsegment `s` at its midpoint; returns the new point index.
  int split_segment(std::size_t s) {
    Segment seg = segs_[s];
    double L = (P_[seg.a] - P_[seg.b]).norm();
    double hmin = in_.size(0.5 * (P_[seg.a] + P_[seg.b]));
    if (L < 1e-6 * hmin) {
      std::ostringstream os;
      os << "segment splitting collapsed near (" << P_[seg.a].x() << ", " << P_[seg.a].y()
         << "); the input geometry has features below the mesh resolution";
      throw MeshingError(os.str());
    }
    Vec2 m = 0.5 * (P_[seg.a] + P_[seg.b]);
    int mi = insert(m);
    segs_[s] = {seg.a, mi, seg.kind, seg.id};
    segs_.push_back({mi, seg.b, seg.kind, seg.id});
    return mi;
  }

  void recover_segments() {
    for (int pass = 0; pass < 200; ++pass) {
      bool all = true;
      for (std::size_t s = 0; s < segs_.size(); ++s) {
        if (!has_edge(segs_[s].a, segs_[s].b)) {
          all = false;
          split_segment(s);
        }
      }
      if (all) return;
    }
    throw MeshingError("segment recovery did not converge");
  }

  bool all_segments_present() const {
    for (const auto& s : segs_)
      if (!has_edge(s.a, s.b)) return false;
    return true;
  }

  std::vector<std::size_t> encroached_by(const Vec2& p) const {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < segs_.size(); ++s) {
      Vec2 a = P_[segs_[s].a], b = P_[segs_[s].b];
      Vec2 m = 0.5 * (a + b);
      double r2 = 0.25 * (a - b).squaredNorm();
      if ((p - m).squaredNorm() < r2 * (1.0 - 1e-12)) out.push_back(s);
    }
    return out;
  }

  // Subsegments crossed by the open segment [p, q].
  int first_crossed(const Vec2& p, const Vec2& q) const {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < segs_.size(); ++s) {
      Vec2 a = P_[segs_[s].a], b = P_[segs_[s].b];
      if (auto x = segment_intersection(p, q, a, b, 0.0)) {
        double d = (*x - p).norm();
        if (d < bd) {
          bd = d;
          best = static_cast<int>(s);
        }
      }
    }
    return best;
  }

  void refine() {
    for (int t = 0; t < static_cast<int>(T_.size()); ++t)
      if (T_[t].alive) queue_.push_back(t);
    const double q2 = in_.quality * in_.quality;
    while (!queue_.empty()) {
      int t = queue_.front();
      queue_.pop_front();
      if (!T_[t].alive || !inside(t)) continue;
      const auto& tr = T_[t];
      Vec2 a = P_[tr.v[0]], b = P_[tr.v[1]], c = P_[tr.v[2]];
      Vec2 cc = circumcenter(a, b, c);
      double R2 = (cc - a).squaredNorm();
      double lmin2 = std::min({(a - b).squaredNorm(), (b - c).squaredNorm(), (c - a).squaredNorm()});
      Vec2 centroid = (a + b + c) / 3.0;
      double s = in_.size(centroid);
      bool too_big = R2 > (s * s) / 3.0 * 1.2;
      bool skinny = R2 > q2 * lmin2;
      if (!too_big && !skinny) continue;
      auto enc = encroached_by(cc);
      if (!enc.empty()) {
        // split in descending index order so indices stay valid
        std::sort(enc.rbegin(), enc.rend());
        for (auto e : enc) split_segment(e);
        if (T_[t].alive) queue_.push_back(t);
        continue;
      }
      int crossed = first_crossed(centroid, cc);
      if (crossed >= 0) {
        split_segment(static_cast<std::size_t>(crossed));
        if (T_[t].alive) queue_.push_back(t);
        continue;
      }
      if (!in_.domain->contains(cc)) continue;
      insert(cc);
    }
  }

  TriangulationOutput output() const {
    TriangulationOutput out;
    std::vector<int> remap(P_.size(), -1);
    for (std::size_t t = 0; t < T_.size(); ++t) {
      if (!T_[t].alive || !inside(static_cast<int>(t))) continue;
      std::array<int, 3> tri{};
      for (int i = 0; i < 3; ++i) {
        int v = T_[t].v[i];
        if (remap[v] < 0) {
          remap[v] = static_cast<int>(out.points.size());
          out.points.push_back(P_[v]);
        }
        tri[i] = remap[v];
      }
      out.triangles.push_back(tri);
    }
    for (const auto& s : segs_) {
      if (remap[s.a] < 0 || remap[s.b] < 0) throw MeshingError("segment outside the domain");
      out.segments.push_back({remap[s.a], remap[s.b], s.kind, s.id});
    }
    return out;
  }
};

}  // namespace

TriangulationOutput triangulate(const TriangulationInput& in) {
  if (!in.domain) throw MeshingError("triangulation needs a domain");
  Mesher m(in);
  return m.run();
}

}  // namespace vvfrac::detail
