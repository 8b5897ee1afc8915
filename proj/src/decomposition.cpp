#include "bimcalc/decomposition.hpp"

#include <deque>
#include <limits>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

namespace bimcalc {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[static_cast<size_t>(a)] != a) a = parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
    return a;
  }
  void unite(int a, int b) {
    a = find(a), b = find(b);
    if (a != b) parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
  }
};

IMat support(const IMat& k) { return (k.array() != 0).cast<int>().matrix(); }

std::string key(const Word& w) {
  std::ostringstream os;
  os << w.source << ':' << w.target << ':' << w.x.mult.rows() << 'x' << w.x.mult.cols();
  for (Eigen::Index j = 0; j < w.x.mult.rows(); ++j)
    for (Eigen::Index i = 0; i < w.x.mult.cols(); ++i) os << ',' << w.x.mult(j, i);
  return os.str();
}

Word compose(const Word& y, const Word& x) {
  return {y.name + "*" + x.name, x.source, y.target, fused(y.x, x.x), y.length + x.length};
}

// ---- bracketings of iterated fusions

struct Tree {
  Bimodule leaf;
  std::shared_ptr<const Tree> l, r;
  bool is_leaf() const { return !l; }
};
using TreeP = std::shared_ptr<const Tree>;

TreeP leaf(const Bimodule& b) { return std::make_shared<const Tree>(Tree{b, nullptr, nullptr}); }
TreeP node(TreeP a, TreeP b) { return std::make_shared<const Tree>(Tree{{}, std::move(a), std::move(b)}); }

Bimodule object_of(const TreeP& t) { return t->is_leaf() ? t->leaf : fused(object_of(t->l), object_of(t->r)); }

void collect(const TreeP& t, std::vector<Bimodule>& out) {
  if (t->is_leaf()) {
    out.push_back(t->leaf);
  } else {
    collect(t->l, out);
    collect(t->r, out);
  }
}

Bimodule right_nested(const std::vector<Bimodule>& ls, size_t from) {
  return from + 1 == ls.size() ? ls[from] : fused(ls[from], right_nested(ls, from + 1));
}

// RN(a) (x) s -> RN(a ++ [s])  where s is already right-nested
Intertwiner pull(const std::vector<Bimodule>& a, size_t from, const Bimodule& s) {
  if (from + 1 == a.size()) return identity(fused(a[from], s));
  Bimodule rest = right_nested(a, from + 1);
  return fuse_morphisms(identity(a[from]), pull(a, from + 1, s)) * associator(a[from], rest, s);
}

Intertwiner to_right(const TreeP& t) {
  if (t->is_leaf()) return identity(t->leaf);
  std::vector<Bimodule> la, lb;
  collect(t->l, la);
  collect(t->r, lb);
  return pull(la, 0, right_nested(lb, 0)) * fuse_morphisms(to_right(t->l), to_right(t->r));
}

Intertwiner regroup(const TreeP& from, const TreeP& to) { return adjoint(to_right(to)) * to_right(from); }

// ---- node helpers

bool corner_nonzero(const Bimodule& x, const Node& target, const Node& source) {
  for (int j : target.blocks)
    for (int i : source.blocks)
      if (x.k(j, i)) return true;
  return false;
}

// Endomorphism word of `object` with nonzero (to, from) entry, fused along a path of words.
Word connecting_word(const std::vector<Word>& words, const std::vector<TracialAlgebra>& objects, int object, int to,
                     int from) {
  const TracialAlgebra& m = objects[static_cast<size_t>(object)];
  const Word* unit = nullptr;
  for (const auto& w : words)
    if (w.length == 0 && w.source == object) unit = &w;
  require(unit != nullptr, ErrorKind::Structural, "missing unit word");
  if (to == from) return *unit;
  std::vector<int> prev(static_cast<size_t>(m.size()), -1);
  std::vector<const Word*> via(static_cast<size_t>(m.size()), nullptr);
  std::deque<int> queue{from};
  prev[static_cast<size_t>(from)] = from;
  while (!queue.empty()) {
    int b = queue.front();
    queue.pop_front();
    for (const auto& w : words) {
      if (w.source != object || w.target != object || w.length == 0) continue;
      for (int a = 0; a < m.size(); ++a)
        if (w.x.k(a, b) && prev[static_cast<size_t>(a)] < 0) {
          prev[static_cast<size_t>(a)] = b;
          via[static_cast<size_t>(a)] = &w;
          queue.push_back(a);
        }
    }
  }
  require(prev[static_cast<size_t>(to)] >= 0, ErrorKind::Precondition,
          "blocks " + std::to_string(from) + " and " + std::to_string(to) + " are not connected");
  Word out = *via[static_cast<size_t>(to)];
  for (int b = prev[static_cast<size_t>(to)]; b != from; b = prev[static_cast<size_t>(b)])
    out = compose(out, *via[static_cast<size_t>(b)]);
  return out;
}

}  // namespace

std::vector<Word> generated_words(const Presentation& b, int depth) {
  require(depth >= 1, ErrorKind::Precondition, "closure depth must be at least 1");
  const int nobj = static_cast<int>(b.objects.size());
  std::vector<Word> base;
  for (const auto& g : b.generators) {
    require(g.source >= 0 && g.source < nobj && g.target >= 0 && g.target < nobj, ErrorKind::Structural,
            "generator " + g.name + " refers to an unknown object");
    require(g.x.source == b.objects[static_cast<size_t>(g.source)] && g.x.target == b.objects[static_cast<size_t>(g.target)],
            ErrorKind::Structural, "generator " + g.name + " does not match its objects");
    base.push_back({g.name, g.source, g.target, g.x, 1});
  }
  if (b.add_conjugates) {
    for (const auto& g : b.generators) base.push_back({"conj(" + g.name + ")", g.target, g.source, conjugate(g.x), 1});
  } else {
    for (const auto& g : b.generators) {
      bool found = false;
      for (const auto& h : b.generators)
        found = found || (h.source == g.target && h.target == g.source && h.x == conjugate(g.x));
      require(found, ErrorKind::Precondition, "closure audit: conjugate of " + g.name + " is not listed");
    }
  }
  std::vector<Word> out;
  std::set<std::string> seen;
  auto add = [&](const Word& w) {
    if (w.x.is_zero()) return false;
    if (!seen.insert(key(w)).second) return false;
    out.push_back(w);
    return true;
  };
  for (int o = 0; o < nobj; ++o) {
    const std::string nm = o < static_cast<int>(b.names.size()) ? b.names[static_cast<size_t>(o)] : std::to_string(o);
    add({"1_" + nm, o, o, unit_bimodule(b.objects[static_cast<size_t>(o)]), 0});
  }
  std::vector<Word> frontier;
  for (const auto& w : base)
    if (add(w)) frontier.push_back(w);
  for (int len = 2; len <= depth; ++len) {
    std::vector<Word> next;
    for (const auto& w : frontier)
      for (const auto& g : base)
        if (g.target == w.source) {
          Word c = compose(w, g);
          if (add(c)) next.push_back(c);
        }
    frontier = std::move(next);
  }
  return out;
}

GridReport component_grid(const TracialAlgebra& m, const std::vector<Bimodule>& gens) {
  GridReport rep;
  UnionFind uf(m.size());
  for (size_t g = 0; g < gens.size(); ++g) {
    const Bimodule& x = gens[g];
    require(x.source == m && x.target == m, ErrorKind::Structural, "component_grid needs endomorphisms");
    rep.supports.push_back(support(x.mult));
    for (int j = 0; j < m.size(); ++j)
      for (int i = 0; i < m.size(); ++i)
        if (x.k(j, i)) uf.unite(i, j);
    if (support(conjugate(x).mult) != rep.supports.back().transpose()) {
      rep.conjugation_swaps = false;
      rep.failure = "conjugate of generator " + std::to_string(g) + " has the wrong support";
    }
  }
  for (size_t a = 0; a < gens.size(); ++a)
    for (size_t c = 0; c < gens.size(); ++c) {
      IMat expect = support(rep.supports[a] * rep.supports[c]);
      if (support(fused(gens[a], gens[c]).mult) != expect) {
        rep.composition_closed = false;
        rep.failure = "fusion of generators " + std::to_string(a) + " and " + std::to_string(c) + " leaves its corner";
      }
    }
  rep.component_of.assign(static_cast<size_t>(m.size()), -1);
  for (int i = 0; i < m.size(); ++i) {
    int root = uf.find(i);
    if (rep.component_of[static_cast<size_t>(root)] < 0) {
      rep.component_of[static_cast<size_t>(root)] = static_cast<int>(rep.components.size());
      rep.components.emplace_back();
    }
    rep.component_of[static_cast<size_t>(i)] = rep.component_of[static_cast<size_t>(root)];
    rep.components[static_cast<size_t>(rep.component_of[static_cast<size_t>(i)])].push_back(i);
  }
  return rep;
}

Bimodule corner(const Bimodule& x, const Node& target, const Node& source) {
  IMat k(static_cast<Eigen::Index>(target.blocks.size()), static_cast<Eigen::Index>(source.blocks.size()));
  for (size_t a = 0; a < target.blocks.size(); ++a)
    for (size_t c = 0; c < source.blocks.size(); ++c)
      k(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = x.k(target.blocks[a], source.blocks[c]);
  return Bimodule(source.algebra, target.algebra, k);
}

SimRelation sim_relation(const Presentation& b, int depth) {
  SimRelation rel;
  rel.words = generated_words(b, depth);
  const size_t nobj = b.objects.size();
  for (size_t o = 0; o < nobj; ++o) {
    std::vector<Bimodule> endo;
    for (const auto& w : rel.words)
      if (w.source == static_cast<int>(o) && w.target == static_cast<int>(o)) endo.push_back(w.x);
    GridReport g = component_grid(b.objects[o], endo);
    require(g.composition_closed && g.conjugation_swaps, ErrorKind::Precondition, "closure audit: " + g.failure);
    for (size_t c = 0; c < g.components.size(); ++c) {
      Node n;
      n.object = static_cast<int>(o);
      n.component = static_cast<int>(c);
      n.blocks = g.components[c];
      std::vector<int> sizes;
      for (int blk : n.blocks) sizes.push_back(b.objects[o].block(blk));
      n.algebra = TracialAlgebra(sizes);
      rel.nodes.push_back(n);
    }
    rel.grids.push_back(g);
  }
  const int nn = static_cast<int>(rel.nodes.size());
  for (int a = 0; a < nn; ++a) rel.witness[{a, a}] = connecting_word(rel.words, b.objects, rel.nodes[static_cast<size_t>(a)].object,
                                                                      rel.nodes[static_cast<size_t>(a)].blocks[0],
                                                                      rel.nodes[static_cast<size_t>(a)].blocks[0]);
  UnionFind uf(nn);
  for (const auto& w : rel.words)
    for (int a = 0; a < nn; ++a)
      for (int c = 0; c < nn; ++c) {
        const Node &na = rel.nodes[static_cast<size_t>(a)], &nc = rel.nodes[static_cast<size_t>(c)];
        if (na.object != w.target || nc.object != w.source || !corner_nonzero(w.x, na, nc)) continue;
        uf.unite(a, c);
        if (!rel.witness.count({a, c})) rel.witness[{a, c}] = w;
      }
  // transitivity through X (x) Z (x) Y
  for (bool grew = true; grew;) {
    grew = false;
    for (int a = 0; a < nn; ++a)
      for (int m = 0; m < nn; ++m)
        for (int c = 0; c < nn; ++c) {
          if (rel.witness.count({a, c}) || !rel.witness.count({a, m}) || !rel.witness.count({m, c})) continue;
          const Word &x = rel.witness.at({a, m}), &y = rel.witness.at({m, c});
          const Node &na = rel.nodes[static_cast<size_t>(a)], &nm = rel.nodes[static_cast<size_t>(m)],
                     &nc = rel.nodes[static_cast<size_t>(c)];
          int e = -1, f = -1;
          for (int blk : nm.blocks) {
            for (int j : na.blocks)
              if (x.x.k(j, blk) && e < 0) e = blk;
            for (int i : nc.blocks)
              if (y.x.k(blk, i) && f < 0) f = blk;
          }
          Word z = connecting_word(rel.words, b.objects, nm.object, e, f);
          Word w = compose(compose(x, z), y);
          if (!corner_nonzero(w.x, na, nc)) {
            rel.transitive = false;
            continue;
          }
          rel.witness[{a, c}] = w;
          grew = true;
        }
  }
  for (const auto& [ac, w] : rel.witness) {
    (void)w;
    if (!rel.witness.count({ac.second, ac.first})) rel.symmetric = false;
    if (uf.find(ac.first) != uf.find(ac.second)) rel.transitive = false;
  }
  for (int a = 0; a < nn; ++a) {
    if (!rel.witness.count({a, a})) rel.reflexive = false;
    for (int c = 0; c < nn; ++c)
      if (uf.find(a) == uf.find(c) && !rel.witness.count({a, c})) rel.transitive = false;
  }
  // distinct pieces of one unit are never related
  for (int a = 0; a < nn; ++a)
    for (int c = a + 1; c < nn; ++c)
      if (rel.nodes[static_cast<size_t>(a)].object == rel.nodes[static_cast<size_t>(c)].object && uf.find(a) == uf.find(c)) {
        auto it = rel.witness.find({a, c});
        throw Error(ErrorKind::Precondition,
                    "closure audit: components " + std::to_string(rel.nodes[static_cast<size_t>(a)].component) + " and " +
                        std::to_string(rel.nodes[static_cast<size_t>(c)].component) + " of object " +
                        std::to_string(rel.nodes[static_cast<size_t>(a)].object) + " are linked by " +
                        (it != rel.witness.end() ? it->second.name : std::string("a composite")) +
                        "; increase the closure depth");
      }
  rel.class_of.assign(static_cast<size_t>(nn), -1);
  for (int a = 0; a < nn; ++a) {
    int root = uf.find(a);
    if (rel.class_of[static_cast<size_t>(root)] < 0) {
      rel.class_of[static_cast<size_t>(root)] = static_cast<int>(rel.classes.size());
      rel.classes.emplace_back();
    }
    rel.class_of[static_cast<size_t>(a)] = rel.class_of[static_cast<size_t>(root)];
    rel.classes[static_cast<size_t>(rel.class_of[static_cast<size_t>(a)])].push_back(a);
  }
  return rel;
}

namespace {

DualitySolution rescaled(const DualitySolution& sol, double d) {
  DualitySolution out = sol;
  out.gamma = cplx(std::sqrt(d)) * sol.gamma;
  out.gammabar = cplx(1.0 / std::sqrt(d)) * sol.gammabar;
  return out;
}

std::vector<TracialAlgebra> objects_of(const SimRelation& rel) {
  std::vector<TracialAlgebra> out;
  for (const auto& w : rel.words)
    if (w.length == 0) {
      if (static_cast<int>(out.size()) <= w.source) out.resize(static_cast<size_t>(w.source) + 1);
      out[static_cast<size_t>(w.source)] = w.x.source;
    }
  return out;
}

void finish(NormalizedGenerator& g) {
  g.conjugate = check_conjugate_equations(g.solution).max();
  g.normalization = distance(adjoint(g.solution.gammabar) * g.solution.gammabar, identity(unit_bimodule(g.x.target)));
}

}  // namespace

NormalizedGenerator choose_normalized_generator(const SimRelation& rel, int m_node, int n_node) {
  const Node& mn = rel.nodes.at(static_cast<size_t>(m_node));
  const Node& nn = rel.nodes.at(static_cast<size_t>(n_node));
  NormalizedGenerator out;
  if (m_node == n_node) {
    out.x = unit_bimodule(mn.algebra);
    out.solution = solution_from_bases(out.x);
    out.connected = is_connected(out.x);
    finish(out);
    return out;
  }
  // hypotheses: both endomorphism categories indecomposable (nodes are components) and hom(M, N) != 0
  const Word* w0 = nullptr;
  int j0 = -1, i0 = -1;
  for (const auto& w : rel.words) {
    if (w.source != mn.object || w.target != nn.object) continue;
    for (size_t a = 0; a < nn.blocks.size() && !w0; ++a)
      for (size_t c = 0; c < mn.blocks.size() && !w0; ++c)
        if (w.x.k(nn.blocks[a], mn.blocks[c])) {
          w0 = &w;
          j0 = static_cast<int>(a);
          i0 = static_cast<int>(c);
        }
    if (w0) break;
  }
  require(w0 != nullptr, ErrorKind::Precondition,
          "choose_normalized_generator: hom between the two unit summands is zero");
  const auto objects = objects_of(rel);
  Bimodule x0 = restrict_blocks(corner(w0->x, nn, mn), [&](int j, int i) { return j == j0 && i == i0; }).sub;
  Bimodule x;
  for (size_t j = 0; j < nn.blocks.size(); ++j) {
    Word y = connecting_word(rel.words, objects, nn.object, nn.blocks[j], nn.blocks[static_cast<size_t>(j0)]);
    Bimodule yj = restrict_blocks(corner(y.x, nn, nn), [&](int a, int c) {
                    return a == static_cast<int>(j) && c == j0;
                  }).sub;
    Bimodule term = fused(yj, x0);
    x = j == 0 ? term : direct_sum(x, term).sum;
  }
  out.x = x;
  out.connected = is_connected(x);
  require(out.connected, ErrorKind::Numerical, "constructed generator is not connected");
  DualitySolution sol = standardize(solution_from_bases(x));
  out.dimension = solution_dimension(sol);
  out.solution = rescaled(sol, out.dimension);
  finish(out);
  return out;
}

ThetaFunctor theta_bifunctor(const SimRelation& rel, int cls) {
  ThetaFunctor th;
  th.nodes = rel.classes.at(static_cast<size_t>(cls));
  th.base = th.nodes.front();
  for (int n : th.nodes) {
    NormalizedGenerator g = choose_normalized_generator(rel, th.base, n);
    require(g.normalization < 1e-8 && g.conjugate < 1e-8, ErrorKind::Numerical, "generator normalization failed");
    th.algebras.emplace(n, from_dual_pair(g.solution, 1e-8));
    th.gens.emplace(n, std::move(g));
  }
  return th;
}

AlgBimodule theta_module(const ThetaFunctor& th, int l, int n, const Bimodule& y) {
  const NormalizedGenerator &gl = th.gens.at(l), &gn = th.gens.at(n);
  const Bimodule &xl = gl.x, &xbl = gl.solution.xbar, &xn = gn.x, &xbn = gn.solution.xbar;
  require(y.source == xn.target && y.target == xl.target, ErrorKind::Structural, "theta_module: wrong hom category");
  const Bimodule w = fused(y, xn);
  AlgBimodule out;
  out.left = th.algebras.at(l);
  out.right = th.algebras.at(n);
  out.x = fused(xbl, w);
  auto L = [](const Bimodule& b) { return leaf(b); };
  // left action through gammabar_l^*
  {
    TreeP from = node(node(L(xbl), L(xl)), node(L(xbl), node(L(y), L(xn))));
    TreeP mid = node(L(xbl), node(node(L(xl), L(xbl)), node(L(y), L(xn))));
    Intertwiner contract = fuse_morphisms(identity(xbl), left_unitor(w) * fuse_morphisms(adjoint(gl.solution.gammabar), identity(w)));
    out.l = contract * regroup(from, mid);
  }
  // right action through gammabar_n^*
  {
    TreeP from = node(node(L(xbl), node(L(y), L(xn))), node(L(xbn), L(xn)));
    TreeP mid = node(node(L(xbl), L(y)), node(node(L(xn), L(xbn)), L(xn)));
    TreeP back_from = node(node(L(xbl), L(y)), L(xn));
    TreeP back_to = node(L(xbl), node(L(y), L(xn)));
    Intertwiner contract = fuse_morphisms(identity(fused(xbl, y)),
                                          left_unitor(xn) * fuse_morphisms(adjoint(gn.solution.gammabar), identity(xn)));
    out.r = regroup(back_from, back_to) * contract * regroup(from, mid);
  }
  return out;
}

Intertwiner theta_morphism(const ThetaFunctor& th, int l, int n, const Intertwiner& t) {
  return fuse_morphisms(identity(th.gens.at(l).solution.xbar), fuse_morphisms(t, identity(th.gens.at(n).x)));
}

namespace {

struct Item {
  int target, source;  // nodes
  Bimodule y;
  std::string name;
};

std::vector<Item> class_items(const SimRelation& rel, const std::vector<int>& nodes) {
  std::vector<Item> out;
  for (const auto& w : rel.words)
    for (int a : nodes)
      for (int c : nodes) {
        const Node &na = rel.nodes[static_cast<size_t>(a)], &nc = rel.nodes[static_cast<size_t>(c)];
        if (na.object == w.target && nc.object == w.source && corner_nonzero(w.x, na, nc))
          out.push_back({a, c, corner(w.x, na, nc), w.name});
      }
  return out;
}

}  // namespace

ThetaAudit audit_theta(const SimRelation& rel, const ThetaFunctor& th, int limit) {
  ThetaAudit a;
  for (int n : th.nodes) {
    AlgebraReport r = verify_algebra(th.algebras.at(n), true);
    a.algebras = worst({a.algebras, r.algebra_residual(), r.frobenius, r.special, r.standard.value_or(0.0)});
    AlgBimodule unit = theta_module(th, n, n, unit_bimodule(rel.nodes[static_cast<size_t>(n)].algebra));
    const Bimodule& xn = th.gens.at(n).x;
    Intertwiner w = fuse_morphisms(identity(th.gens.at(n).solution.xbar), left_unitor(xn));
    AlgBimodule reg = regular_module(th.algebras.at(n));
    a.unit = worst({a.unit, module_map_residual(unit, reg, w), distance(adjoint(w) * w, identity(unit.x))});
  }
  std::vector<Item> items = class_items(rel, th.nodes);
  Rng rng(7);
  for (const auto& it : items) {
    AlgBimodule m = theta_module(th, it.target, it.source, it.y);
    ModuleReport r = verify_module(m);
    a.modules = worst({a.modules, r.axioms(), r.special()});
    const int dim = intertwiner_dim(it.y, it.y);
    Mat images(intertwiner_dim(m.x, m.x), dim);
    for (int c = 0; c < dim; ++c) {
      CVec e = CVec::Zero(dim);
      e(c) = 1;
      images.col(c) = coords(theta_morphism(th, it.target, it.source, from_coords(it.y, it.y, e)));
    }
    if (numerical_rank(images, 1e-9) != dim) a.injective = false;
  }
  int checked = 0;
  for (const auto& z : items)
    for (const auto& y : items) {
      if (z.source != y.target || checked >= limit) continue;
      ++checked;
      const NormalizedGenerator &gp = th.gens.at(z.target), &gl = th.gens.at(z.source), &gn = th.gens.at(y.source);
      AlgBimodule tz = theta_module(th, z.target, z.source, z.y), ty = theta_module(th, y.target, y.source, y.y);
      auto L = [](const Bimodule& b) { return leaf(b); };
      const Bimodule &xbp = gp.solution.xbar, &xl = gl.x, &xbl = gl.solution.xbar, &xn = gn.x;
      TreeP plain = node(node(L(xbp), node(L(z.y), L(xl))), node(L(xbl), node(L(y.y), L(xn))));
      TreeP mid = node(node(L(xbp), L(z.y)), node(node(L(xl), L(xbl)), node(L(y.y), L(xn))));
      const Bimodule tail = fused(y.y, xn);
      const Intertwiner& gb = gl.solution.gammabar;
      Intertwiner proj = adjoint(regroup(plain, mid)) *
                         fuse_morphisms(identity(fused(xbp, z.y)), fuse_morphisms(gb * adjoint(gb), identity(tail))) *
                         regroup(plain, mid);
      RelativeProduct rp = rel_tensor(tz, ty);
      a.projection = worst({a.projection, distance(rp.p, proj)});
      Bimodule zy = fused(z.y, y.y);
      AlgBimodule tzy = theta_module(th, z.target, y.source, zy);
      TreeP split = node(node(L(xbp), L(z.y)), node(L(y.y), L(xn)));
      TreeP joined = node(L(xbp), node(node(L(z.y), L(y.y)), L(xn)));
      Intertwiner v = regroup(split, joined) *
                      fuse_morphisms(identity(fused(xbp, z.y)), left_unitor(tail) * fuse_morphisms(adjoint(gb), identity(tail))) *
                      regroup(plain, mid) * rp.s;
      // Theta(Z (x) Y) is built on (Z (x) Y) (x) X_n with Z (x) Y fused directly
      a.composition = worst({a.composition, module_map_residual(rp.product, tzy, v),
                             distance(adjoint(v) * v, identity(rp.product.x)), distance(v * adjoint(v), identity(tzy.x))});
    }
  return a;
}

ClassRealization realize_class(const SimRelation& rel, int cls, std::uint64_t seed) {
  ClassRealization cr;
  cr.theta = theta_bifunctor(rel, cls);
  cr.audit = audit_theta(rel, cr.theta);
  for (int n : cr.theta.nodes) {
    Extension e = extension_algebra(cr.theta.algebras.at(n), 1e-8, seed);
    StandardBimodule sx = standard_bimodule_X(e);
    RealizationIso u = iso_u(e, sx);
    MoritaReport m = morita_check(e, sx, u);
    cr.ext.emplace(n, std::move(e));
    cr.standard.emplace(n, std::move(sx));
    cr.iso.emplace(n, std::move(u));
    cr.morita.emplace(n, std::move(m));
  }
  return cr;
}

PhiImage phi_module(const ClassRealization& cr, int l, int n, const Bimodule& y) {
  PhiImage out;
  out.theta = theta_module(cr.theta, l, n, y);
  out.inner = rel_tensor(cr.morita.at(l).x_module, out.theta);
  out.outer = rel_tensor(out.inner.product, cr.morita.at(n).xbar_module);
  return out;
}

Intertwiner phi_morphism(const ClassRealization& cr, int l, int n, const PhiImage& a, const PhiImage& b,
                         const Intertwiner& t) {
  Intertwiner th = theta_morphism(cr.theta, l, n, t);
  Intertwiner inner = rel_tensor_morphisms(a.inner, b.inner, identity(cr.morita.at(l).x_module.x), th);
  return rel_tensor_morphisms(a.outer, b.outer, inner, identity(cr.morita.at(n).xbar_module.x));
}

bool PhiReport::tables_match() const {
  for (const auto& row : table)
    if (row.source != row.theta || row.source != row.phi) return false;
  return cross_class == 0;
}

PhiReport phi_realize(const Presentation& b, int depth, std::uint64_t seed) {
  PhiReport rep;
  rep.relation = sim_relation(b, depth);
  const SimRelation& rel = rep.relation;
  require(rel.reflexive && rel.symmetric && rel.transitive, ErrorKind::Numerical, "relation on unit summands is not an equivalence");
  for (size_t c = 0; c < rel.classes.size(); ++c) {
    rep.classes.push_back(realize_class(rel, static_cast<int>(c), seed));
    rep.base.push_back(rep.classes.back().theta.base);
    const ThetaAudit& a = rep.classes.back().audit;
    rep.theta = worst({rep.theta, a.modules, a.projection, a.composition, a.unit, a.algebras,
                       a.injective ? 0.0 : std::numeric_limits<double>::infinity()});
    for (const auto& [n, e] : rep.classes.back().ext) {
      const RealizationIso& u = rep.classes.back().iso.at(n);
      const MoritaReport& m = rep.classes.back().morita.at(n);
      rep.realization = worst({rep.realization, e.closure, e.adjoint_formula, e.star_iso, e.center_match, e.inclusion_hom,
                               e.k_identity, e.k_commutes, u.unitary, u.bimodular, u.unit, u.mult, u.special_gap,
                               m.module_axioms, m.xbar_x, m.x_xbar,
                               (m.rank_p == m.dim_l2n && m.hom_h == m.hom_l2n) ? 0.0 : std::numeric_limits<double>::infinity()});
    }
  }
  auto cls_of = [&](int node) { return static_cast<size_t>(rel.class_of[static_cast<size_t>(node)]); };

  // Phi on objects: concatenate the target algebras of the pieces of each unit
  rep.node_offsets.resize(b.objects.size());
  std::vector<int> node_offset(rel.nodes.size(), 0);
  for (size_t o = 0; o < b.objects.size(); ++o) {
    std::vector<int> sizes;
    for (size_t a = 0; a < rel.nodes.size(); ++a) {
      if (rel.nodes[a].object != static_cast<int>(o)) continue;
      node_offset[a] = static_cast<int>(sizes.size());
      rep.node_offsets[o].push_back(node_offset[a]);
      const TracialAlgebra& t = rep.classes[cls_of(static_cast<int>(a))].ext.at(static_cast<int>(a)).n;
      for (int q = 0; q < t.size(); ++q) sizes.push_back(t.block(q));
    }
    rep.targets.emplace_back(sizes);
  }

  // Phi on words, corner by corner
  std::vector<std::vector<std::tuple<int, int, PhiImage>>> images(rel.words.size());
  for (size_t wi = 0; wi < rel.words.size(); ++wi) {
    const Word& w = rel.words[wi];
    IMat k = IMat::Zero(rep.targets[static_cast<size_t>(w.target)].size(), rep.targets[static_cast<size_t>(w.source)].size());
    for (size_t a = 0; a < rel.nodes.size(); ++a)
      for (size_t c = 0; c < rel.nodes.size(); ++c) {
        const Node &na = rel.nodes[a], &nc = rel.nodes[c];
        if (na.object != w.target || nc.object != w.source || !corner_nonzero(w.x, na, nc)) continue;
        if (cls_of(static_cast<int>(a)) != cls_of(static_cast<int>(c))) {
          ++rep.cross_class;
          continue;
        }
        const ClassRealization& cr = rep.classes[cls_of(static_cast<int>(a))];
        PhiImage img = phi_module(cr, static_cast<int>(a), static_cast<int>(c), corner(w.x, na, nc));
        const IMat& pk = img.module().x.mult;
        k.block(node_offset[a], node_offset[c], pk.rows(), pk.cols()) = pk;
        images[wi].emplace_back(static_cast<int>(a), static_cast<int>(c), std::move(img));
      }
    rep.word_images.push_back(k);
  }

  // hom-dimension tables
  for (size_t w1 = 0; w1 < rel.words.size(); ++w1)
    for (size_t w2 = 0; w2 < rel.words.size(); ++w2) {
      const Word &y1 = rel.words[w1], &y2 = rel.words[w2];
      if (y1.source != y2.source || y1.target != y2.target) continue;
      HomRow row{y1.name, y2.name, intertwiner_dim(y1.x, y2.x), 0, 0};
      for (const auto& [a1, c1, i1] : images[w1])
        for (const auto& [a2, c2, i2] : images[w2])
          if (a1 == a2 && c1 == c2) row.theta += static_cast<int>(module_maps(i1.theta, i2.theta).size());
      const TracialAlgebra &src = rep.targets[static_cast<size_t>(y1.source)], &tgt = rep.targets[static_cast<size_t>(y1.target)];
      row.phi = intertwiner_dim(Bimodule(src, tgt, rep.word_images[w1]), Bimodule(src, tgt, rep.word_images[w2]));
      rep.table.push_back(row);
    }

  // 2-morphisms: composition and adjoints
  Rng rng(seed);
  for (size_t wi = 0; wi < rel.words.size(); ++wi)
    for (const auto& [a, c, img] : images[wi]) {
      const ClassRealization& cr = rep.classes[cls_of(a)];
      const Bimodule y = corner(rel.words[wi].x, rel.nodes[static_cast<size_t>(a)], rel.nodes[static_cast<size_t>(c)]);
      Intertwiner s = random_intertwiner(y, y, rng), t = random_intertwiner(y, y, rng);
      Intertwiner ps = phi_morphism(cr, a, c, img, img, s), pt = phi_morphism(cr, a, c, img, img, t);
      const double scale = std::max(1.0, opnorm(s) * opnorm(t));
      rep.functoriality = worst({rep.functoriality, distance(phi_morphism(cr, a, c, img, img, s * t), ps * pt) / scale,
                                 distance(phi_morphism(cr, a, c, img, img, adjoint(t)), adjoint(pt)) / std::max(1.0, opnorm(t))});
    }

  // unit summands are standard algebras
  for (const auto& n : rel.nodes) {
    const TracialAlgebra& obj = b.objects[static_cast<size_t>(n.object)];
    Restriction r = restrict_blocks(unit_bimodule(obj), [&](int j, int i) {
      return j == i && std::find(n.blocks.begin(), n.blocks.end(), j) != n.blocks.end();
    });
    Bimodule hh = fused(r.sub, r.sub);
    Intertwiner m = zero_map(hh, r.sub);
    for (int j : n.blocks) m.block(j, j).setIdentity();
    FrobeniusAlgebra f{r.sub, m, adjoint(r.incl)};
    AlgebraReport ar = verify_algebra(f, true);
    rep.unit_standard = worst({rep.unit_standard, ar.algebra_residual(), ar.frobenius, ar.special, ar.standard.value_or(0.0)});
  }
  return rep;
}

}  // namespace bimcalc
