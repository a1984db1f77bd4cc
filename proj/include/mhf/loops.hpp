#pragma once

// Edge words on a ribbon map, free reduction, primal and dual spanning trees,
// lassos, free bases of the reduced-loop group and tame generators.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mhf/error.hpp"
#include "mhf/group.hpp"
#include "mhf/rational.hpp"
#include "mhf/ribbon_map.hpp"

namespace mhf {

/// A path of darts starting at `base`.
struct EdgeWord {
  int base = 0;
  std::vector<int> darts;

  bool empty() const noexcept { return darts.empty(); }
  std::size_t size() const noexcept { return darts.size(); }
  friend bool operator==(const EdgeWord&, const EdgeWord&) = default;
};

/// Throws InputError if the darts do not chain head to tail from `base`.
inline void check_path(const RibbonMap& m, const EdgeWord& w) {
  if (w.base < 0 || w.base >= m.vertex_count()) throw InputError("word: base is not a vertex");
  int at = w.base;
  for (int d : w.darts) {
    if (d < 0 || d >= m.dart_count()) throw InputError("word: dart " + std::to_string(d) + " is outside the map");
    if (m.tail(d) != at) throw InputError("word: broken chaining at dart " + std::to_string(d));
    at = m.head(d);
  }
}

inline int endpoint(const RibbonMap& m, const EdgeWord& w) {
  return w.darts.empty() ? w.base : m.head(w.darts.back());
}

inline bool is_loop(const RibbonMap& m, const EdgeWord& w) { return endpoint(m, w) == w.base; }

/// Unique reduced representative: adjacent dart/reverse pairs cancelled.
inline EdgeWord reduce(const RibbonMap& m, const EdgeWord& w) {
  check_path(m, w);
  EdgeWord r{w.base, {}};
  for (int d : w.darts) {
    if (!r.darts.empty() && m.alpha(r.darts.back()) == d) {
      r.darts.pop_back();
    } else {
      r.darts.push_back(d);
    }
  }
  return r;
}

inline bool is_reduced(const RibbonMap& m, const EdgeWord& w) {
  for (std::size_t i = 1; i < w.darts.size(); ++i)
    if (m.alpha(w.darts[i - 1]) == w.darts[i]) return false;
  return true;
}

inline EdgeWord inverse(const RibbonMap& m, const EdgeWord& w) {
  EdgeWord r{endpoint(m, w), {}};
  for (auto it = w.darts.rbegin(); it != w.darts.rend(); ++it) r.darts.push_back(m.alpha(*it));
  return r;
}

/// Concatenation; throws if b does not start where a ends.
inline EdgeWord concat(const RibbonMap& m, const EdgeWord& a, const EdgeWord& b) {
  if (endpoint(m, a) != b.base) throw InputError("word: concatenation of non-composable paths");
  EdgeWord r = a;
  r.darts.insert(r.darts.end(), b.darts.begin(), b.darts.end());
  return r;
}

struct SpanningTree {
  std::vector<char> member;  // per edge
  std::vector<int> edges;    // ascending

  bool contains(int edge) const { return member.at(static_cast<std::size_t>(edge)) != 0; }
};

/// Spanning tree avoiding `forbidden` and containing `required`, grown by a
/// breadth-first sweep from vertex 0 that scans rotations in order. Throws
/// InputError if the allowed edges do not connect the map or the required
/// edges contain a cycle.
inline SpanningTree spanning_tree(const RibbonMap& m, const std::set<int>& forbidden = {},
                                  const std::set<int>& required = {}) {
  const int V = m.vertex_count();
  std::vector<int> parent(static_cast<std::size_t>(V));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  SpanningTree t;
  t.member.assign(static_cast<std::size_t>(m.edge_count()), 0);
  int joined = 0;
  auto add = [&](int e) {
    int d = m.positive_dart(e);
    int a = find(m.tail(d)), b = find(m.head(d));
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    t.member[static_cast<std::size_t>(e)] = 1;
    ++joined;
    return true;
  };
  for (int e : required) {
    if (forbidden.count(e)) throw InputError("spanning tree: an edge is both required and forbidden");
    if (!add(e)) throw InputError("spanning tree: required edges contain a cycle");
  }
  std::vector<char> seen(static_cast<std::size_t>(V), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int d : m.rotation(v)) {
      int e = m.edge_of(d);
      if (forbidden.count(e)) continue;
      add(e);
      int w = m.head(d);
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        q.push(w);
      }
    }
  }
  if (joined != V - 1) throw InputError("spanning tree: the allowed edges do not connect the map");
  for (int e = 0; e < m.edge_count(); ++e)
    if (t.member[static_cast<std::size_t>(e)]) t.edges.push_back(e);
  return t;
}

/// Tree path [from, to]_T.
inline EdgeWord tree_path(const RibbonMap& m, const SpanningTree& t, int from, int to) {
  const int V = m.vertex_count();
  std::vector<int> via(static_cast<std::size_t>(V), -2);
  via[static_cast<std::size_t>(from)] = -1;
  std::queue<int> q;
  q.push(from);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    if (v == to) break;
    for (int d : m.rotation(v)) {
      if (!t.contains(m.edge_of(d))) continue;
      int w = m.head(d);
      if (via[static_cast<std::size_t>(w)] == -2) {
        via[static_cast<std::size_t>(w)] = d;
        q.push(w);
      }
    }
  }
  if (via[static_cast<std::size_t>(to)] == -2) throw InputError("tree path: vertices are not joined by the tree");
  EdgeWord w{from, {}};
  for (int v = to; v != from;) {
    int d = via[static_cast<std::size_t>(v)];
    w.darts.push_back(d);
    v = m.tail(d);
  }
  std::reverse(w.darts.begin(), w.darts.end());
  return w;
}

struct DualTree {
  int root = 0;
  std::vector<int> order;        // faces in breadth-first order, root first
  std::vector<int> parent_face;  // −1 for the root
  std::vector<int> parent_edge;  // primal edge crossed to reach the face
  std::vector<int> edges;        // primal edges crossed by the tree, ascending
};

namespace detail {

inline int other_side(const RibbonMap& m, FramedDart f) {
  return m.faces().face_of[static_cast<std::size_t>(FramedDart{f.dart, -f.eps}.index())];
}

/// Breadth-first tree over the faces in `allowed_faces` (all faces if empty),
/// crossing only interior edges accepted by `edge_ok`, scanning each face's
/// cycle in order.
template <class EdgeOk>
DualTree dual_tree_impl(const RibbonMap& m, int root, EdgeOk edge_ok, const std::vector<char>& face_allowed) {
  const int F = m.face_count();
  DualTree t;
  t.root = root;
  t.parent_face.assign(static_cast<std::size_t>(F), -2);
  t.parent_edge.assign(static_cast<std::size_t>(F), -1);
  t.parent_face[static_cast<std::size_t>(root)] = -1;
  std::queue<int> q;
  q.push(root);
  while (!q.empty()) {
    int f = q.front();
    q.pop();
    t.order.push_back(f);
    for (const auto& fd : m.faces().cycles[static_cast<std::size_t>(f)]) {
      int e = m.edge_of(fd.dart);
      if (m.is_boundary_edge(e) || !edge_ok(e)) continue;
      int g = other_side(m, fd);
      if (g < 0 || g == f || !face_allowed[static_cast<std::size_t>(g)]) continue;
      if (t.parent_face[static_cast<std::size_t>(g)] != -2) continue;
      t.parent_face[static_cast<std::size_t>(g)] = f;
      t.parent_edge[static_cast<std::size_t>(g)] = e;
      t.edges.push_back(e);
      q.push(g);
    }
  }
  std::sort(t.edges.begin(), t.edges.end());
  return t;
}

}  // namespace detail

/// Breadth-first dual spanning tree rooted at face 0 (the face holding the
/// least framed dart), using only non-boundary edges.
inline DualTree dual_spanning_tree(const RibbonMap& m) {
  std::vector<char> all(static_cast<std::size_t>(m.face_count()), 1);
  DualTree t = detail::dual_tree_impl(m, 0, [](int) { return true; }, all);
  if (static_cast<int>(t.order.size()) != m.face_count()) throw InputError("dual tree: the dual graph is disconnected");
  return t;
}

/// l_{e,T} = [v, tail e]_T e [head e, v]_T, reduced.
inline EdgeWord lasso(const RibbonMap& m, const SpanningTree& t, int dart, int base) {
  if (base < 0 || base >= m.vertex_count()) throw InputError("lasso: base is not a vertex");
  EdgeWord w = tree_path(m, t, base, m.tail(dart));
  w.darts.push_back(dart);
  EdgeWord back = tree_path(m, t, m.head(dart), base);
  w.darts.insert(w.darts.end(), back.darts.begin(), back.darts.end());
  return reduce(m, w);
}

/// Lassos of the positive darts of the edges outside T, by edge id.
inline std::vector<EdgeWord> free_basis(const RibbonMap& m, int base, const SpanningTree& t) {
  std::vector<EdgeWord> out;
  for (int e = 0; e < m.edge_count(); ++e)
    if (!t.contains(e)) out.push_back(lasso(m, t, m.positive_dart(e), base));
  return out;
}

/// Signed edge-count vector of a word.
inline std::vector<long long> abelianize(const RibbonMap& m, const EdgeWord& w) {
  std::vector<long long> v(static_cast<std::size_t>(m.edge_count()), 0);
  for (int d : w.darts) v[static_cast<std::size_t>(m.edge_of(d))] += m.is_positive(d) ? 1 : -1;
  return v;
}

/// Rank over the rationals of the abelianized words.
inline int abelian_rank(const RibbonMap& m, const std::vector<EdgeWord>& words) {
  std::vector<std::vector<Rational>> a;
  for (const auto& w : words) {
    auto v = abelianize(m, w);
    a.emplace_back(v.begin(), v.end());
  }
  const std::size_t cols = static_cast<std::size_t>(m.edge_count());
  int rank = 0;
  for (std::size_t c = 0; c < cols && static_cast<std::size_t>(rank) < a.size(); ++c) {
    std::size_t piv = static_cast<std::size_t>(rank);
    while (piv < a.size() && a[piv][c] == 0) ++piv;
    if (piv == a.size()) continue;
    std::swap(a[piv], a[static_cast<std::size_t>(rank)]);
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (r == static_cast<std::size_t>(rank) || a[r][c] == 0) continue;
      Rational f = a[r][c] / a[static_cast<std::size_t>(rank)][c];
      for (std::size_t k = c; k < cols; ++k) a[r][k] -= f * a[static_cast<std::size_t>(rank)][k];
    }
    ++rank;
  }
  return rank;
}

struct SignedLetter {
  int index = 0;
  int exponent = 1;
  friend bool operator==(const SignedLetter&, const SignedLetter&) = default;
};

/// Tame generators a₁..a_g, c₁..c_p, l₁..l_f based at `base`, with the single
/// relation w(a)·c₁···c_p = l₁···l_f.
struct TameGenerators {
  int base = 0;
  std::vector<EdgeWord> a, c, l;
  std::vector<SignedLetter> w;
  /// Boundary circuit of c_i, and +1 if h(c_i) lies in the class of the
  /// listed circuit, −1 if in the inverse class.
  std::vector<int> c_circuit, c_exponent;
  /// Face bounded by l_i.
  std::vector<int> face_of_l;
  /// l_i = K_i · C_i · K_i⁻¹ with K_i a path from the base and C_i a framed
  /// facial cycle.
  std::vector<EdgeWord> l_conjugator;
  std::vector<std::vector<FramedDart>> l_cycle;
  SpanningTree tree;
  DualTree dual;
  std::vector<int> r_edges, b_edges;

  /// w(a)·c₁···c_p·(l₁···l_f)⁻¹, unreduced.
  EdgeWord relation_word(const RibbonMap& m) const {
    EdgeWord r{base, {}};
    for (const auto& s : w) {
      const EdgeWord& x = a.at(static_cast<std::size_t>(s.index));
      EdgeWord y = s.exponent > 0 ? x : inverse(m, x);
      r.darts.insert(r.darts.end(), y.darts.begin(), y.darts.end());
    }
    for (const auto& x : c) r.darts.insert(r.darts.end(), x.darts.begin(), x.darts.end());
    for (auto it = l.rbegin(); it != l.rend(); ++it) {
      EdgeWord y = inverse(m, *it);
      r.darts.insert(r.darts.end(), y.darts.begin(), y.darts.end());
    }
    return r;
  }

  /// All generators except the last facial lasso.
  std::vector<EdgeWord> basis() const {
    std::vector<EdgeWord> out = a;
    out.insert(out.end(), c.begin(), c.end());
    if (!l.empty()) out.insert(out.end(), l.begin(), l.end() - 1);
    return out;
  }
};

namespace detail {

/// Reversal of a framed cycle under ᾱ.
inline std::vector<FramedDart> reversed_cycle(const RibbonMap& m, const std::vector<FramedDart>& c) {
  std::vector<FramedDart> r;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r.push_back(m.alpha_bar(*it));
  return r;
}

/// Cycle of `face` oriented to contain `f` and rotated to start there.
inline std::vector<FramedDart> face_cycle_from(const RibbonMap& m, int face, FramedDart f) {
  auto c = m.face_cycle(face);
  if (m.faces().reversed[static_cast<std::size_t>(f.index())]) c = reversed_cycle(m, c);
  auto it = std::find(c.begin(), c.end(), f);
  if (it == c.end()) throw InputError("face cycle: framed dart not on face");
  std::rotate(c.begin(), it, c.end());
  return c;
}

inline std::vector<int> darts_of(const std::vector<FramedDart>& c) {
  std::vector<int> r;
  for (const auto& f : c) r.push_back(f.dart);
  return r;
}

/// Glues faces along a dual tree into one polygon P, starting from the root
/// cycle. Returns, per merged face, the loop y⁻¹·C·y at the polygon's start,
/// so that the product of these loops in merge order equals P.
struct MergeResult {
  std::vector<FramedDart> polygon;
  std::vector<int> faces;                     // merge order
  std::vector<EdgeWord> pieces;               // y⁻¹ C y, based at the polygon start
  std::vector<EdgeWord> conj;                 // y⁻¹ for each piece
  std::vector<std::vector<FramedDart>> cycles;  // C for each piece
};

inline MergeResult merge_faces(const RibbonMap& m, const DualTree& t, std::vector<FramedDart> root_cycle) {
  MergeResult r;
  r.polygon = std::move(root_cycle);
  const int p0 = r.polygon.empty() ? 0 : m.tail(r.polygon[0].dart);
  r.faces.push_back(t.root);
  r.pieces.push_back(EdgeWord{p0, darts_of(r.polygon)});
  r.conj.push_back(EdgeWord{p0, {}});
  r.cycles.push_back(r.polygon);
  for (std::size_t k = 1; k < t.order.size(); ++k) {
    int f = t.order[k];
    int e = t.parent_edge[static_cast<std::size_t>(f)];
    auto pos = std::find_if(r.polygon.begin(), r.polygon.end(), [&](const FramedDart& x) { return m.edge_of(x.dart) == e; });
    if (pos == r.polygon.end()) throw InputError("face merge: attaching edge not on the polygon");
    FramedDart at = *pos;
    FramedDart start = m.alpha_bar(FramedDart{at.dart, -at.eps});
    if (m.faces().face_of[static_cast<std::size_t>(start.index())] != f) throw InputError("face merge: inconsistent dual edge");
    auto child = face_cycle_from(m, f, start);
    std::size_t i = static_cast<std::size_t>(pos - r.polygon.begin());
    EdgeWord yinv{p0, {}};
    // y = polygon after position i; y⁻¹ runs back from p0 to head(e).
    for (std::size_t j = r.polygon.size(); j-- > i + 1;) yinv.darts.push_back(m.alpha(r.polygon[j].dart));
    EdgeWord piece = yinv;
    for (const auto& x : child) piece.darts.push_back(x.dart);
    for (std::size_t j = i + 1; j < r.polygon.size(); ++j) piece.darts.push_back(r.polygon[j].dart);
    std::vector<FramedDart> merged(r.polygon.begin(), r.polygon.begin() + static_cast<std::ptrdiff_t>(i));
    merged.insert(merged.end(), child.begin() + 1, child.end());
    merged.insert(merged.end(), r.polygon.begin() + static_cast<std::ptrdiff_t>(i) + 1, r.polygon.end());
    r.polygon = std::move(merged);
    r.faces.push_back(f);
    r.pieces.push_back(std::move(piece));
    r.conj.push_back(std::move(yinv));
    r.cycles.push_back(std::move(child));
  }
  return r;
}

}  // namespace detail

/// Tame generators of the reduced-loop group at `base`: trees T and T̂ with
/// E = T ∪ B ∪ R ∪ f(T̂), facial lassos from gluing the faces along T̂, lassos
/// of the R-edges as a-letters and conjugated lassos of the B-edges as
/// boundary generators.
inline TameGenerators tame_generators(const RibbonMap& m, int base = 0) {
  if (base < 0 || base >= m.vertex_count()) throw InputError("tame generators: base is not a vertex");
  TameGenerators tg;
  tg.base = base;
  tg.dual = dual_spanning_tree(m);

  std::set<int> forbidden(tg.dual.edges.begin(), tg.dual.edges.end());
  std::set<int> required;
  std::vector<int> b_dart;
  for (std::size_t c = 0; c < m.boundary().size(); ++c) {
    const auto& circ = m.boundary()[c];
    int best = *std::min_element(circ.begin(), circ.end());
    b_dart.push_back(best);
    tg.b_edges.push_back(m.edge_of(best));
    forbidden.insert(m.edge_of(best));
    for (int d : circ)
      if (d != best) required.insert(m.edge_of(d));
  }
  tg.tree = spanning_tree(m, forbidden, required);
  for (int e = 0; e < m.edge_count(); ++e)
    if (!tg.tree.contains(e) && !forbidden.count(e)) tg.r_edges.push_back(e);

  // Facial lassos.
  std::vector<FramedDart> root_cycle = m.face_cycle(tg.dual.root);
  auto merged = detail::merge_faces(m, tg.dual, root_cycle);
  const int p0 = root_cycle.empty() ? base : m.tail(root_cycle[0].dart);
  EdgeWord s = tree_path(m, tg.tree, base, p0);
  EdgeWord s_inv = inverse(m, s);
  for (std::size_t k = 0; k < merged.faces.size(); ++k) {
    EdgeWord K = concat(m, s, merged.conj[k]);
    EdgeWord lw = concat(m, concat(m, s, merged.pieces[k]), s_inv);
    tg.l.push_back(reduce(m, lw));
    tg.face_of_l.push_back(merged.faces[k]);
    tg.l_conjugator.push_back(reduce(m, K));
    tg.l_cycle.push_back(merged.cycles[k]);
  }

  // a-lassos indexed by R-edge.
  std::map<int, int> r_index;
  for (std::size_t i = 0; i < tg.r_edges.size(); ++i) {
    r_index[tg.r_edges[i]] = static_cast<int>(i);
    tg.a.push_back(lasso(m, tg.tree, m.positive_dart(tg.r_edges[i]), base));
  }
  std::map<int, int> b_index;
  for (std::size_t i = 0; i < tg.b_edges.size(); ++i) b_index[tg.b_edges[i]] = static_cast<int>(i);

  // s·W₀·s⁻¹ = t₀ b₁ t₁ … b_p t_p as a word in edge lassos.
  struct Piece {
    bool boundary;
    int index;
    int exponent;
    int dart;
  };
  std::vector<Piece> seq;
  for (const auto& fd : merged.polygon) {
    int e = m.edge_of(fd.dart);
    if (tg.tree.contains(e)) continue;
    int ex = m.is_positive(fd.dart) ? 1 : -1;
    if (auto it = r_index.find(e); it != r_index.end()) {
      seq.push_back({false, it->second, ex, fd.dart});
    } else if (auto jt = b_index.find(e); jt != b_index.end()) {
      seq.push_back({true, jt->second, ex, fd.dart});
    } else {
      throw InputError("tame generators: a dual-tree edge survived the gluing");
    }
  }
  std::vector<std::vector<SignedLetter>> t_blocks(1);
  std::vector<Piece> b_seq;
  for (const auto& pc : seq) {
    if (pc.boundary) {
      b_seq.push_back(pc);
      t_blocks.emplace_back();
    } else {
      t_blocks.back().push_back({pc.index, pc.exponent});
    }
  }
  if (b_seq.size() != tg.b_edges.size()) throw InputError("tame generators: boundary edge count mismatch");
  for (const auto& blk : t_blocks) tg.w.insert(tg.w.end(), blk.begin(), blk.end());

  auto letters_word = [&](const std::vector<SignedLetter>& ls) {
    EdgeWord r{base, {}};
    for (const auto& s2 : ls) {
      const EdgeWord& x = tg.a[static_cast<std::size_t>(s2.index)];
      EdgeWord y = s2.exponent > 0 ? x : inverse(m, x);
      r.darts.insert(r.darts.end(), y.darts.begin(), y.darts.end());
    }
    return r;
  };
  for (std::size_t i = 0; i < b_seq.size(); ++i) {
    std::vector<SignedLetter> tail_letters;
    for (std::size_t j = i + 1; j < t_blocks.size(); ++j)
      tail_letters.insert(tail_letters.end(), t_blocks[j].begin(), t_blocks[j].end());
    EdgeWord u = letters_word(tail_letters);
    EdgeWord bl = lasso(m, tg.tree, b_seq[i].dart, base);
    EdgeWord cw = concat(m, concat(m, inverse(m, u), bl), u);
    tg.c.push_back(reduce(m, cw));
    int circuit = m.boundary_circuit_of_edge(m.edge_of(b_seq[i].dart));
    tg.c_circuit.push_back(circuit);
    tg.c_exponent.push_back(m.boundary_sign(b_seq[i].dart));
  }
  if (!reduce(m, tg.relation_word(m)).empty()) throw InputError("tame generators: relation does not reduce to the empty word");
  return tg;
}

/// Tame generators of a refinement: the a- and c-lassos are carried over as
/// fine words, and each coarse facial lasso is factored into the facial
/// lassos of its sub-faces, glued along the edges added inside it.
inline TameGenerators refine_generators(const TameGenerators& coarse, const RibbonMap& coarse_map,
                                        const Refinement& ref) {
  const RibbonMap& fm = ref.fine;
  if (ref.dart_image.size() != static_cast<std::size_t>(coarse_map.dart_count())) {
    throw InputError("refine: dart images do not match the coarse map");
  }
  if (ref.face_parent.size() != static_cast<std::size_t>(fm.face_count())) {
    throw InputError("refine: face containment does not match the fine map");
  }
  auto image = [&](const EdgeWord& w) {
    EdgeWord r{w.base, {}};
    for (int d : w.darts) {
      const auto& p = ref.dart_image[static_cast<std::size_t>(d)];
      r.darts.insert(r.darts.end(), p.begin(), p.end());
    }
    check_path(fm, r);
    return r;
  };
  std::vector<char> old_dart(static_cast<std::size_t>(fm.dart_count()), 0);
  for (const auto& p : ref.dart_image)
    for (int d : p) old_dart[static_cast<std::size_t>(d)] = 1;

  TameGenerators tg;
  tg.base = coarse.base;
  for (const auto& x : coarse.a) tg.a.push_back(reduce(fm, image(x)));
  for (const auto& x : coarse.c) tg.c.push_back(reduce(fm, image(x)));
  tg.w = coarse.w;
  tg.c_circuit = coarse.c_circuit;
  tg.c_exponent = coarse.c_exponent;

  for (std::size_t i = 0; i < coarse.l.size(); ++i) {
    const int F = coarse.face_of_l[i];
    const auto& cyc = coarse.l_cycle[i];
    EdgeWord K = image(coarse.l_conjugator[i]);
    std::vector<char> allowed(static_cast<std::size_t>(fm.face_count()), 0);
    int sub_faces = 0;
    for (int f = 0; f < fm.face_count(); ++f) {
      if (ref.face_parent[static_cast<std::size_t>(f)] == F) {
        allowed[static_cast<std::size_t>(f)] = 1;
        ++sub_faces;
      }
    }
    if (cyc.empty()) {
      if (sub_faces != 1) throw InputError("refine: an empty face cannot be subdivided");
      int f = static_cast<int>(std::find(allowed.begin(), allowed.end(), 1) - allowed.begin());
      tg.l.push_back(reduce(fm, concat(fm, K, inverse(fm, K))));
      tg.face_of_l.push_back(f);
      tg.l_conjugator.push_back(K);
      tg.l_cycle.push_back({});
      continue;
    }
    const FramedDart start = cyc[0];
    const int root = fm.faces().face_of[static_cast<std::size_t>(start.index())];
    if (root < 0 || !allowed[static_cast<std::size_t>(root)]) throw InputError("refine: face containment is inconsistent");
    DualTree t = detail::dual_tree_impl(
        fm, root, [&](int e) { return !old_dart[static_cast<std::size_t>(fm.positive_dart(e))]; }, allowed);
    if (static_cast<int>(t.order.size()) != sub_faces) throw InputError("refine: sub-faces are not joined by added edges");
    auto merged = detail::merge_faces(fm, t, detail::face_cycle_from(fm, root, start));
    std::vector<int> expect;
    for (const auto& fd : cyc) {
      const auto& p = ref.dart_image[static_cast<std::size_t>(fd.dart)];
      expect.insert(expect.end(), p.begin(), p.end());
    }
    if (detail::darts_of(merged.polygon) != expect) throw InputError("refine: glued sub-faces do not rebuild the coarse face");
    EdgeWord K_inv = inverse(fm, K);
    for (std::size_t k = 0; k < merged.faces.size(); ++k) {
      EdgeWord Kk = concat(fm, K, merged.conj[k]);
      tg.l.push_back(reduce(fm, concat(fm, concat(fm, K, merged.pieces[k]), K_inv)));
      tg.face_of_l.push_back(merged.faces[k]);
      tg.l_conjugator.push_back(reduce(fm, Kk));
      tg.l_cycle.push_back(merged.cycles[k]);
    }
  }
  if (!reduce(fm, tg.relation_word(fm)).empty()) throw InputError("refine: relation does not reduce to the empty word");
  return tg;
}

/// One group element per edge, attached to its positive dart.
using HolonomyConfig = std::vector<Element>;

/// h(e₁⋯e_m) = h(e_m)⋯h(e₁), with h(α d) = h(d)⁻¹.
inline Element holonomy_of_word(const FiniteGroup& g, const RibbonMap& m, const HolonomyConfig& config,
                                const EdgeWord& w) {
  if (config.size() != static_cast<std::size_t>(m.edge_count())) throw InputError("holonomy: configuration size mismatch");
  Element h = g.identity();
  for (int d : w.darts) {
    if (d < 0 || d >= m.dart_count()) throw InputError("holonomy: dart outside the map");
    Element x = config[static_cast<std::size_t>(m.edge_of(d))];
    if (!m.is_positive(d)) x = g.inv(x);
    h = g.mul(x, h);
  }
  return h;
}

/// Holonomy along a framed facial cycle, read from its first dart.
inline Element holonomy_of_cycle(const FiniteGroup& g, const RibbonMap& m, const HolonomyConfig& config,
                                 const std::vector<FramedDart>& cycle) {
  Element h = g.identity();
  for (const auto& f : cycle) {
    Element x = config[static_cast<std::size_t>(m.edge_of(f.dart))];
    if (!m.is_positive(f.dart)) x = g.inv(x);
    h = g.mul(x, h);
  }
  return h;
}

}  // namespace mhf
