#pragma once

// Graphs on compact surfaces as combinatorial maps: darts, the reversal
// involution α, vertex rotations σ, edge signatures λ and boundary circuits.
// Faces are the cycles of the framed face permutation
//   φ̄(e, ε) = (σ^{−λ_e ε}(α e), λ_e ε)
// acting on the framed darts fr(E) ⊂ E × {±1}.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mhf/error.hpp"

namespace mhf {

struct FramedDart {
  int dart = 0;
  int eps = 1;

  int index() const noexcept { return 2 * dart + (eps < 0 ? 1 : 0); }
  static FramedDart from_index(int i) noexcept { return {i / 2, (i % 2) ? -1 : 1}; }
  friend bool operator==(const FramedDart&, const FramedDart&) = default;
};

struct FaceSet {
  /// One framed cycle per face, starting at its lowest framed index. For
  /// orientable maps this is the positively oriented cycle.
  std::vector<std::vector<FramedDart>> cycles;
  /// Per framed index: face containing it, or −1 outside fr(E).
  std::vector<int> face_of;
  /// Per framed index: true if it lies on the reversal of the stored cycle.
  std::vector<char> reversed;

  int count() const noexcept { return static_cast<int>(cycles.size()); }

  /// Dart sequence of face i.
  std::vector<int> word(int i) const {
    std::vector<int> w;
    for (const auto& fd : cycles.at(static_cast<std::size_t>(i))) w.push_back(fd.dart);
    return w;
  }
};

struct Topology {
  int v = 0, e = 0, f = 0;
  int chi = 0;
  bool orientable = true;
  int genus = 0;  // reduced genus
  int boundary = 0;
};

class RibbonMap {
 public:
  struct Data {
    int darts = 0;
    std::vector<int> alpha;
    std::vector<std::vector<int>> rotation;  // per vertex, cyclic order of outgoing darts
    std::vector<int> lambda;                 // per edge (edge ids by ascending least dart)
    std::vector<std::vector<int>> boundary;  // circuits of darts
    std::optional<std::vector<double>> areas;
  };

  RibbonMap() : RibbonMap(sphere_data()) {}

  /// Validates the data and computes faces. Throws InputError when α is not
  /// a fixed-point-free involution, the rotations do not partition the darts,
  /// the skeleton is disconnected, λ ∉ {±1}, the boundary circuits are
  /// inconsistent or the areas do not match the faces.
  explicit RibbonMap(Data d) : d_(std::move(d)) { build(); }

  const Data& data() const noexcept { return d_; }
  int dart_count() const noexcept { return d_.darts; }
  int edge_count() const noexcept { return d_.darts / 2; }
  int vertex_count() const noexcept { return static_cast<int>(d_.rotation.size()); }

  int alpha(int dart) const { return d_.alpha.at(static_cast<std::size_t>(dart)); }
  int sigma(int dart) const { return sigma_.at(static_cast<std::size_t>(dart)); }
  int sigma_inv(int dart) const { return sigma_inv_.at(static_cast<std::size_t>(dart)); }
  int tail(int dart) const { return vertex_of_.at(static_cast<std::size_t>(dart)); }
  int head(int dart) const { return tail(alpha(dart)); }
  int edge_of(int dart) const { return edge_of_.at(static_cast<std::size_t>(dart)); }
  /// Least dart of the edge; the orientation used for holonomy configurations.
  int positive_dart(int edge) const { return positive_.at(static_cast<std::size_t>(edge)); }
  bool is_positive(int dart) const { return positive_dart(edge_of(dart)) == dart; }
  int lambda(int edge) const { return d_.lambda.at(static_cast<std::size_t>(edge)); }
  int lambda_of_dart(int dart) const { return lambda(edge_of(dart)); }
  const std::vector<int>& rotation(int v) const { return d_.rotation.at(static_cast<std::size_t>(v)); }
  const std::vector<std::vector<int>>& boundary() const noexcept { return d_.boundary; }
  int boundary_count() const noexcept { return static_cast<int>(d_.boundary.size()); }
  bool is_boundary_edge(int edge) const { return boundary_circuit_of_edge_.at(static_cast<std::size_t>(edge)) >= 0; }
  int boundary_circuit_of_edge(int edge) const { return boundary_circuit_of_edge_.at(static_cast<std::size_t>(edge)); }
  /// +1 for listed boundary darts, −1 for their reverses, 0 for interior darts.
  int boundary_sign(int dart) const { return boundary_sign_.at(static_cast<std::size_t>(dart)); }

  bool in_framing(FramedDart f) const {
    int b = boundary_sign(f.dart);
    return b == 0 || b == f.eps;
  }

  FramedDart phi_bar(FramedDart f) const {
    const int l = lambda_of_dart(f.dart);
    const int e2 = l * f.eps;
    const int a = alpha(f.dart);
    return {e2 > 0 ? sigma_inv(a) : sigma(a), e2};
  }
  FramedDart alpha_bar(FramedDart f) const { return {alpha(f.dart), -lambda_of_dart(f.dart) * f.eps}; }
  FramedDart sigma_bar(FramedDart f) const { return {f.eps > 0 ? sigma(f.dart) : sigma_inv(f.dart), -f.eps}; }

  const FaceSet& faces() const noexcept { return faces_; }
  int face_count() const noexcept { return faces_.count(); }
  const std::optional<std::vector<double>>& areas() const noexcept { return d_.areas; }
  bool has_areas() const noexcept { return d_.areas.has_value(); }
  double area(int face) const {
    if (!d_.areas) throw InputError("map: face areas are not assigned");
    return d_.areas->at(static_cast<std::size_t>(face));
  }
  double total_area() const {
    if (!d_.areas) throw InputError("map: face areas are not assigned");
    return std::accumulate(d_.areas->begin(), d_.areas->end(), 0.0);
  }

  /// Per-vertex sign s_v with λ_e s_tail s_head = +1 on a BFS tree.
  const std::vector<int>& vertex_gauge() const noexcept { return gauge_; }
  bool orientable() const noexcept { return orientable_; }

  Topology topology() const {
    Topology t;
    t.v = vertex_count();
    t.e = edge_count();
    t.f = face_count();
    t.chi = t.v - t.e + t.f;
    t.orientable = orientable_;
    t.boundary = boundary_count();
    t.genus = 2 - t.boundary - t.chi;
    return t;
  }

  RibbonMap with_areas(std::vector<double> areas) const {
    Data d = d_;
    d.areas = std::move(areas);
    return RibbonMap(std::move(d));
  }

  /// Total area t split over faces proportionally to their dart length (the
  /// empty face of the edgeless sphere gets everything).
  RibbonMap with_proportional_areas(double t) const {
    if (!(t > 0.0)) throw InputError("map: total area must be positive");
    std::vector<double> a(static_cast<std::size_t>(face_count()));
    double len = 0.0;
    for (const auto& c : faces_.cycles) len += static_cast<double>(c.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = len > 0.0 ? t * static_cast<double>(faces_.cycles[i].size()) / len : t / static_cast<double>(a.size());
    }
    return with_areas(std::move(a));
  }

  /// Path of darts of a face starting at its stored first corner.
  std::vector<FramedDart> face_cycle(int face) const { return faces_.cycles.at(static_cast<std::size_t>(face)); }

 private:
  static Data sphere_data() {
    Data d;
    d.rotation = {{}};
    return d;
  }

  void build() {
    const int D = d_.darts;
    if (D < 0 || D % 2 != 0) throw InputError("map: dart count must be even and non-negative");
    if (d_.alpha.size() != static_cast<std::size_t>(D)) throw InputError("map: alpha has wrong length");
    for (int x = 0; x < D; ++x) {
      int y = d_.alpha[static_cast<std::size_t>(x)];
      if (y < 0 || y >= D || y == x || d_.alpha[static_cast<std::size_t>(y)] != x) {
        throw InputError("map: alpha is not a fixed-point-free involution at dart " + std::to_string(x));
      }
    }
    if (d_.rotation.empty()) throw InputError("map: at least one vertex is required");

    sigma_.assign(static_cast<std::size_t>(D), -1);
    sigma_inv_.assign(static_cast<std::size_t>(D), -1);
    vertex_of_.assign(static_cast<std::size_t>(D), -1);
    for (std::size_t v = 0; v < d_.rotation.size(); ++v) {
      const auto& cyc = d_.rotation[v];
      if (cyc.empty() && D > 0) throw InputError("map: vertex " + std::to_string(v) + " has no darts");
      for (std::size_t i = 0; i < cyc.size(); ++i) {
        int x = cyc[i];
        if (x < 0 || x >= D) throw InputError("map: rotation of vertex " + std::to_string(v) + " has an invalid dart");
        if (vertex_of_[static_cast<std::size_t>(x)] >= 0) {
          throw InputError("map: dart " + std::to_string(x) + " appears in more than one rotation slot");
        }
        vertex_of_[static_cast<std::size_t>(x)] = static_cast<int>(v);
        int y = cyc[(i + 1) % cyc.size()];
        sigma_[static_cast<std::size_t>(x)] = y;
      }
    }
    for (int x = 0; x < D; ++x) {
      if (vertex_of_[static_cast<std::size_t>(x)] < 0) throw InputError("map: dart " + std::to_string(x) + " is in no rotation");
      sigma_inv_[static_cast<std::size_t>(sigma_[static_cast<std::size_t>(x)])] = x;
    }

    // Edge ids by ascending least dart.
    edge_of_.assign(static_cast<std::size_t>(D), -1);
    positive_.clear();
    for (int x = 0; x < D; ++x) {
      int y = d_.alpha[static_cast<std::size_t>(x)];
      if (x < y) {
        edge_of_[static_cast<std::size_t>(x)] = edge_of_[static_cast<std::size_t>(y)] = static_cast<int>(positive_.size());
        positive_.push_back(x);
      }
    }
    if (d_.lambda.empty()) d_.lambda.assign(positive_.size(), 1);
    if (d_.lambda.size() != positive_.size()) throw InputError("map: lambda must have one entry per edge");
    for (int l : d_.lambda)
      if (l != 1 && l != -1) throw InputError("map: lambda entries must be +1 or -1");

    check_connected();
    compute_gauge();
    check_boundary();
    compute_faces();

    if (d_.areas) {
      if (d_.areas->size() != static_cast<std::size_t>(faces_.count())) {
        throw InputError("map: expected " + std::to_string(faces_.count()) + " face areas, got " +
                         std::to_string(d_.areas->size()));
      }
      for (double a : *d_.areas)
        if (!(a > 0.0)) throw InputError("map: face areas must be positive");
    }
  }

  void check_connected() const {
    const int V = vertex_count();
    std::vector<char> seen(static_cast<std::size_t>(V), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int x : d_.rotation[static_cast<std::size_t>(v)]) {
        int w = vertex_of_[static_cast<std::size_t>(d_.alpha[static_cast<std::size_t>(x)])];
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          ++reached;
          q.push(w);
        }
      }
    }
    if (reached != V) throw InputError("map: the skeleton is disconnected");
  }

  void compute_gauge() {
    const int V = vertex_count();
    gauge_.assign(static_cast<std::size_t>(V), 0);
    gauge_[0] = 1;
    std::queue<int> q;
    q.push(0);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int x : d_.rotation[static_cast<std::size_t>(v)]) {
        int w = head(x);
        if (gauge_[static_cast<std::size_t>(w)] == 0) {
          gauge_[static_cast<std::size_t>(w)] = lambda_of_dart(x) * gauge_[static_cast<std::size_t>(v)];
          q.push(w);
        }
      }
    }
    orientable_ = true;
    for (int x = 0; x < d_.darts; ++x) {
      if (lambda_of_dart(x) * gauge_[static_cast<std::size_t>(tail(x))] * gauge_[static_cast<std::size_t>(head(x))] != 1) {
        orientable_ = false;
      }
    }
  }

  void check_boundary() {
    const int D = d_.darts;
    boundary_sign_.assign(static_cast<std::size_t>(D), 0);
    boundary_circuit_of_edge_.assign(positive_.size(), -1);
    for (std::size_t c = 0; c < d_.boundary.size(); ++c) {
      const auto& circ = d_.boundary[c];
      if (circ.empty()) throw InputError("map: empty boundary circuit");
      for (std::size_t i = 0; i < circ.size(); ++i) {
        int x = circ[i];
        if (x < 0 || x >= D) throw InputError("map: boundary dart out of range");
        int e = edge_of_[static_cast<std::size_t>(x)];
        if (boundary_circuit_of_edge_[static_cast<std::size_t>(e)] >= 0) {
          throw InputError("map: edge " + std::to_string(e) + " is listed on the boundary twice");
        }
        if (d_.lambda[static_cast<std::size_t>(e)] != 1) throw InputError("map: boundary edges must have lambda = +1");
        boundary_circuit_of_edge_[static_cast<std::size_t>(e)] = static_cast<int>(c);
        boundary_sign_[static_cast<std::size_t>(x)] = 1;
        boundary_sign_[static_cast<std::size_t>(d_.alpha[static_cast<std::size_t>(x)])] = -1;
        int next = circ[(i + 1) % circ.size()];
        if (head(x) != tail(next)) throw InputError("map: boundary circuit " + std::to_string(c) + " does not chain");
      }
    }
    // φ̄ must preserve fr(E), and each circuit must be exactly one cycle of
    // the excluded framed darts.
    for (int x = 0; x < D; ++x) {
      for (int eps : {1, -1}) {
        FramedDart f{x, eps};
        if (in_framing(f) != in_framing(phi_bar(f))) {
          throw InputError("map: boundary circuits are inconsistent with the rotation at dart " + std::to_string(x));
        }
      }
    }
    for (std::size_t c = 0; c < d_.boundary.size(); ++c) {
      const auto& circ = d_.boundary[c];
      std::set<int> expect;
      for (int x : circ) expect.insert(FramedDart{d_.alpha[static_cast<std::size_t>(x)], 1}.index());
      std::set<int> orbit;
      FramedDart f{d_.alpha[static_cast<std::size_t>(circ[0])], 1};
      FramedDart g = f;
      do {
        orbit.insert(g.index());
        g = phi_bar(g);
      } while (!(g == f) && orbit.size() <= static_cast<std::size_t>(2 * D));
      if (orbit != expect) throw InputError("map: boundary circuit " + std::to_string(c) + " does not bound a single hole");
    }
  }

  void compute_faces() {
    const int D = d_.darts;
    faces_ = FaceSet{};
    faces_.face_of.assign(static_cast<std::size_t>(2 * D), -1);
    faces_.reversed.assign(static_cast<std::size_t>(2 * D), 0);
    if (D == 0) {
      faces_.cycles.push_back({});
      return;
    }
    std::vector<int> cycle_id(static_cast<std::size_t>(2 * D), -1);
    std::vector<std::vector<FramedDart>> cycles;
    for (int i = 0; i < 2 * D; ++i) {
      FramedDart f = FramedDart::from_index(i);
      if (!in_framing(f) || cycle_id[static_cast<std::size_t>(i)] >= 0) continue;
      std::vector<FramedDart> cyc;
      FramedDart g = f;
      do {
        cycle_id[static_cast<std::size_t>(g.index())] = static_cast<int>(cycles.size());
        cyc.push_back(g);
        g = phi_bar(g);
      } while (!(g == f));
      cycles.push_back(std::move(cyc));  // starts at its least framed index
    }
    // Pair each cycle with its reversal under ᾱ.
    std::vector<char> done(cycles.size(), 0);
    for (std::size_t c = 0; c < cycles.size(); ++c) {
      if (done[c]) continue;
      int partner = cycle_id[static_cast<std::size_t>(alpha_bar(cycles[c][0]).index())];
      if (partner < 0 || static_cast<std::size_t>(partner) == c) {
        throw InputError("map: a facial cycle is not paired with a distinct reversal");
      }
      done[c] = done[static_cast<std::size_t>(partner)] = 1;
      std::size_t keep = c;
      if (orientable_) {
        const FramedDart& f = cycles[c][0];
        if (f.eps * gauge_[static_cast<std::size_t>(tail(f.dart))] != 1) keep = static_cast<std::size_t>(partner);
      }
      std::size_t other = keep == c ? static_cast<std::size_t>(partner) : c;
      int id = faces_.count();
      for (const auto& f : cycles[keep]) faces_.face_of[static_cast<std::size_t>(f.index())] = id;
      for (const auto& f : cycles[other]) {
        faces_.face_of[static_cast<std::size_t>(f.index())] = id;
        faces_.reversed[static_cast<std::size_t>(f.index())] = 1;
      }
      faces_.cycles.push_back(cycles[keep]);
    }
    // Order faces by their first framed index.
    std::vector<int> order(faces_.cycles.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return faces_.cycles[static_cast<std::size_t>(a)][0].index() < faces_.cycles[static_cast<std::size_t>(b)][0].index();
    });
    std::vector<int> rank(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    std::vector<std::vector<FramedDart>> sorted(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = std::move(faces_.cycles[static_cast<std::size_t>(order[i])]);
    faces_.cycles = std::move(sorted);
    for (auto& f : faces_.face_of)
      if (f >= 0) f = rank[static_cast<std::size_t>(f)];
  }

  Data d_;
  std::vector<int> sigma_, sigma_inv_, vertex_of_, edge_of_, positive_;
  std::vector<int> boundary_sign_, boundary_circuit_of_edge_;
  std::vector<int> gauge_;
  bool orientable_ = true;
  FaceSet faces_;
};

inline const FaceSet& faces(const RibbonMap& m) { return m.faces(); }
inline Topology euler_and_genus(const RibbonMap& m) { return m.topology(); }

/// Builds the rotations of a map from its facial words. Each word is a cyclic
/// sequence of darts read as a φ̄-cycle starting with sign +1; corners not
/// fixed by any word (around holes) are closed up at each vertex in order of
/// least dart. `tail[d]` is the vertex of dart d, and α pairs 2k with 2k+1.
inline RibbonMap map_from_face_words(int vertices, const std::vector<int>& tail, const std::vector<int>& lambda,
                                     const std::vector<std::vector<int>>& words,
                                     const std::vector<std::vector<int>>& boundary) {
  const int D = static_cast<int>(tail.size());
  RibbonMap::Data d;
  d.darts = D;
  d.alpha.resize(static_cast<std::size_t>(D));
  for (int x = 0; x < D; ++x) d.alpha[static_cast<std::size_t>(x)] = x ^ 1;
  d.lambda = lambda;
  d.boundary = boundary;
  auto lam = [&](int x) { return lambda.at(static_cast<std::size_t>(x / 2)); };

  std::vector<int> next(static_cast<std::size_t>(D), -1), prev(static_cast<std::size_t>(D), -1);
  auto link = [&](int a, int b) {
    if (next[static_cast<std::size_t>(a)] >= 0 || prev[static_cast<std::size_t>(b)] >= 0) {
      throw InputError("face words assign a rotation twice");
    }
    next[static_cast<std::size_t>(a)] = b;
    prev[static_cast<std::size_t>(b)] = a;
  };
  for (const auto& w : words) {
    int eps = 1;
    for (std::size_t i = 0; i < w.size(); ++i) {
      int e = w[i];
      int f = w[(i + 1) % w.size()];
      int eps2 = lam(e) * eps;
      if (eps2 > 0) {
        link(f, e ^ 1);  // σ(f) = α e
      } else {
        link(e ^ 1, f);  // σ(α e) = f
      }
      eps = eps2;
    }
    if (eps != 1) throw InputError("face word has an odd number of twisted letters");
  }
  d.rotation.assign(static_cast<std::size_t>(vertices), {});
  std::vector<char> used(static_cast<std::size_t>(D), 0);
  for (int v = 0; v < vertices; ++v) {
    std::vector<std::vector<int>> chains;
    for (int x = 0; x < D; ++x) {
      if (tail[static_cast<std::size_t>(x)] != v || used[static_cast<std::size_t>(x)]) continue;
      int start = x;
      while (prev[static_cast<std::size_t>(start)] >= 0 && prev[static_cast<std::size_t>(start)] != x) start = prev[static_cast<std::size_t>(start)];
      std::vector<int> chain;
      int y = start;
      do {
        chain.push_back(y);
        used[static_cast<std::size_t>(y)] = 1;
        y = next[static_cast<std::size_t>(y)];
      } while (y >= 0 && y != start);
      chains.push_back(std::move(chain));
    }
    for (auto& c : chains)
      for (int x : c) d.rotation[static_cast<std::size_t>(v)].push_back(x);
  }
  return RibbonMap(std::move(d));
}

/// One-face model of a surface: one interior vertex carrying the word
/// w(a₁..a_g)·d₁c₁d₁⁻¹···d_p c_p d_p⁻¹, with boundary loops c_i at extra
/// vertices 1..p joined by spokes d_i. Edge k has darts 2k (positive) and
/// 2k+1; the a_i come first, then d_i, c_i in pairs.
inline RibbonMap standard_map(bool orientable, int genus, int boundary_count) {
  if (genus < 0 || boundary_count < 0) throw InputError("surface: genus and boundary count must be non-negative");
  if (orientable && genus % 2 != 0) throw InputError("surface: orientable surfaces have even reduced genus");
  if (!orientable && genus < 1) throw InputError("surface: non-orientable surfaces have reduced genus at least 1");
  const int g = genus, p = boundary_count;
  if (g == 0 && p == 0) return RibbonMap();
  const int E = g + 2 * p;
  std::vector<int> tail(static_cast<std::size_t>(2 * E), 0);
  std::vector<int> lambda(static_cast<std::size_t>(E), 1);
  std::vector<int> word;
  std::vector<std::vector<int>> boundary;
  if (orientable) {
    for (int i = 0; i < g; i += 2) {
      int a = 2 * i, b = 2 * (i + 1);
      word.insert(word.end(), {a, b, a + 1, b + 1});
    }
  } else {
    for (int i = 0; i < g; ++i) {
      lambda[static_cast<std::size_t>(i)] = -1;
      word.insert(word.end(), {2 * i, 2 * i});
    }
  }
  for (int i = 0; i < p; ++i) {
    int dk = g + 2 * i, ck = g + 2 * i + 1;
    int v = i + 1;
    tail[static_cast<std::size_t>(2 * dk)] = 0;
    tail[static_cast<std::size_t>(2 * dk + 1)] = v;
    tail[static_cast<std::size_t>(2 * ck)] = v;
    tail[static_cast<std::size_t>(2 * ck + 1)] = v;
    word.insert(word.end(), {2 * dk, 2 * ck, 2 * dk + 1});
    boundary.push_back({2 * ck});
  }
  return map_from_face_words(1 + p, tail, lambda, {word}, boundary);
}

/// A refined map with the image of each coarse dart as a path of fine darts
/// and the coarse face containing each fine face.
struct Refinement {
  RibbonMap fine;
  std::vector<std::vector<int>> dart_image;
  std::vector<int> face_parent;
};

inline Refinement identity_refinement(const RibbonMap& m) {
  Refinement r{m, {}, {}};
  for (int x = 0; x < m.dart_count(); ++x) r.dart_image.push_back({x});
  for (int f = 0; f < m.face_count(); ++f) r.face_parent.push_back(f);
  return r;
}

/// Replaces an edge by two edges through a new vertex of degree 2. Old darts
/// keep their ids; the two new darts are appended.
inline Refinement subdivide_edge(const RibbonMap& m, int edge) {
  if (edge < 0 || edge >= m.edge_count()) throw InputError("subdivide: edge out of range");
  RibbonMap::Data d = m.data();
  const int D = d.darts;
  const int x = m.positive_dart(edge), y = m.alpha(x);
  const int n1 = D, n2 = D + 1;  // n1: m→tail(x), n2: m→tail(y)
  const int mid = m.vertex_count();
  d.darts = D + 2;
  d.alpha.resize(static_cast<std::size_t>(D + 2));
  d.alpha[static_cast<std::size_t>(x)] = n1;
  d.alpha[static_cast<std::size_t>(n1)] = x;
  d.alpha[static_cast<std::size_t>(y)] = n2;
  d.alpha[static_cast<std::size_t>(n2)] = y;
  d.rotation.push_back({n1, n2});
  // Recompute λ under the new edge numbering.
  std::vector<int> lam_of_dart(static_cast<std::size_t>(D + 2));
  for (int z = 0; z < D; ++z) lam_of_dart[static_cast<std::size_t>(z)] = m.lambda_of_dart(z);
  lam_of_dart[static_cast<std::size_t>(x)] = lam_of_dart[static_cast<std::size_t>(n1)] = 1;
  lam_of_dart[static_cast<std::size_t>(y)] = lam_of_dart[static_cast<std::size_t>(n2)] = m.lambda(edge);
  d.lambda.clear();
  for (int z = 0; z < D + 2; ++z)
    if (z < d.alpha[static_cast<std::size_t>(z)]) d.lambda.push_back(lam_of_dart[static_cast<std::size_t>(z)]);
  for (auto& circ : d.boundary) {
    std::vector<int> out;
    for (int z : circ) {
      out.push_back(z);
      if (z == x) out.push_back(n2);
      if (z == y) out.push_back(n1);
    }
    circ = std::move(out);
  }
  d.areas.reset();
  Refinement r{RibbonMap(std::move(d)), {}, {}};
  for (int z = 0; z < D; ++z) r.dart_image.push_back({z});
  r.dart_image[static_cast<std::size_t>(x)] = {x, n2};
  r.dart_image[static_cast<std::size_t>(y)] = {y, n1};
  const auto& ff = r.fine.faces();
  for (int f = 0; f < ff.count(); ++f) {
    const FramedDart& fd = ff.cycles[static_cast<std::size_t>(f)][0];
    r.face_parent.push_back(m.faces().face_of[static_cast<std::size_t>(fd.index())]);
  }
  if (m.has_areas()) {
    std::vector<double> a;
    for (int p : r.face_parent) a.push_back(m.area(p));
    r.fine = r.fine.with_areas(std::move(a));
  }
  return r;
}

/// Adds an edge inside `face` joining corners i and j of its stored cycle
/// (corner k sits before the k-th framed dart). The new edge y runs from
/// corner i to corner j; the sub-face through d_i…d_{j−1} gets area1, the
/// other area2. Areas of untouched faces are carried over when present.
inline Refinement split_face(const RibbonMap& m, int face, int corner_i, int corner_j,
                             std::optional<std::pair<double, double>> sub_areas = std::nullopt) {
  if (face < 0 || face >= m.face_count()) throw InputError("split: face out of range");
  const auto cyc = m.face_cycle(face);
  const int L = static_cast<int>(cyc.size());
  if (L == 0) throw InputError("split: the face has no corners");
  if (corner_i < 0 || corner_j < 0 || corner_i >= L || corner_j >= L || corner_i == corner_j) {
    throw InputError("split: corners must be distinct corners of the face");
  }
  if (sub_areas && !(sub_areas->first > 0.0 && sub_areas->second > 0.0)) {
    throw InputError("split: sub-face areas must be positive");
  }
  if (m.has_areas() && !sub_areas) throw InputError("split: sub-face areas are required on a map with areas");
  RibbonMap::Data d = m.data();
  const int D = d.darts;
  const int y = D, z = D + 1;
  d.darts = D + 2;
  d.alpha.push_back(z);
  d.alpha.push_back(y);
  auto corner_prev = [&](int k) { return cyc[static_cast<std::size_t>((k + L - 1) % L)].dart; };
  // Insert dart `nd` at corner k of the face, given the current rotations.
  auto insert = [&](int k, int nd) {
    const FramedDart& dk = cyc[static_cast<std::size_t>(k)];
    int before = m.alpha(corner_prev(k));
    int v = m.tail(dk.dart);
    auto& rot = d.rotation[static_cast<std::size_t>(v)];
    // σ(dk) = before (ε = +1) or σ(before) = dk (ε = −1); place nd between.
    int first = dk.eps > 0 ? dk.dart : before;
    auto it = std::find(rot.begin(), rot.end(), first);
    if (it == rot.end()) throw InputError("split: corner not found in rotation");
    rot.insert(it + 1, nd);
  };
  insert(corner_i, y);
  insert(corner_j, z);
  const int lam_new = cyc[static_cast<std::size_t>(corner_i)].eps * cyc[static_cast<std::size_t>(corner_j)].eps;
  d.lambda.push_back(lam_new);
  d.areas.reset();
  RibbonMap fine(std::move(d));
  Refinement r{fine, {}, {}};
  for (int x = 0; x < D; ++x) r.dart_image.push_back({x});
  const auto& ff = fine.faces();
  const int face_a = ff.face_of[static_cast<std::size_t>(FramedDart{z, cyc[static_cast<std::size_t>(corner_j)].eps}.index())];
  for (int f = 0; f < ff.count(); ++f) {
    for (const auto& fd : ff.cycles[static_cast<std::size_t>(f)]) {
      if (fd.dart < D) {
        r.face_parent.push_back(m.faces().face_of[static_cast<std::size_t>(fd.index())]);
        break;
      }
    }
  }
  if (sub_areas) {
    std::vector<double> a(static_cast<std::size_t>(ff.count()));
    for (int f = 0; f < ff.count(); ++f) {
      int parent = r.face_parent[static_cast<std::size_t>(f)];
      if (parent != face) {
        a[static_cast<std::size_t>(f)] = m.area(parent);
      } else {
        a[static_cast<std::size_t>(f)] = f == face_a ? sub_areas->first : sub_areas->second;
      }
    }
    r.fine = fine.with_areas(std::move(a));
  }
  return r;
}

/// Refinement r2 of r1.fine composed with r1.
inline Refinement compose(const Refinement& r1, const Refinement& r2) {
  Refinement r{r2.fine, {}, {}};
  for (const auto& path : r1.dart_image) {
    std::vector<int> out;
    for (int x : path) {
      const auto& sub = r2.dart_image.at(static_cast<std::size_t>(x));
      out.insert(out.end(), sub.begin(), sub.end());
    }
    r.dart_image.push_back(std::move(out));
  }
  for (int p : r2.face_parent) r.face_parent.push_back(r1.face_parent.at(static_cast<std::size_t>(p)));
  return r;
}

}  // namespace mhf
