#pragma once

#include "bimcalc/realization.hpp"

#include <map>
#include <string>

namespace bimcalc {

struct Generator {
  std::string name;
  int source = 0, target = 0;  // object indices; x is in hom(source, target)
  Bimodule x;
};

// Finite presentation of a rigid bicategory: hom categories are spanned by sub-bimodules of
// fusions of generators (and their conjugates) up to a fixed length.
struct Presentation {
  std::vector<std::string> names;
  std::vector<TracialAlgebra> objects;
  std::vector<Generator> generators;
  bool add_conjugates = true;  // otherwise every conjugate must be listed
};

struct Word {
  std::string name;
  int source = 0, target = 0;
  Bimodule x;
  int length = 0;  // 0 for units
};

// Units, generators, conjugates and their composable fusions up to `depth` factors, deduplicated
// by multiplicity matrix. Throws when a generator has the wrong shape or a conjugate is missing.
std::vector<Word> generated_words(const Presentation& b, int depth);

struct GridReport {
  std::vector<IMat> supports;            // zero pattern of each generator
  std::vector<std::vector<int>> components;
  std::vector<int> component_of;         // block -> component
  bool composition_closed = true;        // support(Y (x) X) = support(Y) support(X)
  bool conjugation_swaps = true;         // support(conj X) = support(X)^T
  std::string failure;
};

// Corner supports p_j X p_i of endomorphism generators of one object and the indecomposable pieces.
GridReport component_grid(const TracialAlgebra& m, const std::vector<Bimodule>& gens);

// Unit summand of an indecomposable piece: (object, component) with the corner algebra it carries.
struct Node {
  int object = 0, component = 0;
  std::vector<int> blocks;
  TracialAlgebra algebra;
};

struct SimRelation {
  std::vector<Word> words;
  std::vector<GridReport> grids;  // per object
  std::vector<Node> nodes;        // ordered by (object, component)
  std::vector<int> class_of;
  std::vector<std::vector<int>> classes;
  // witness[(a,b)]: word in hom(object b, object a) with nonzero corner (a, b)
  std::map<std::pair<int, int>, Word> witness;
  bool reflexive = true, symmetric = true, transitive = true;
};

SimRelation sim_relation(const Presentation& b, int depth = 3);

// p_a X p_b as a bimodule between the corner algebras.
Bimodule corner(const Bimodule& x, const Node& target, const Node& source);

struct NormalizedGenerator {
  Bimodule x;  // in hom(M node, N node)
  DualitySolution solution;
  bool connected = false;
  double dimension = 1;     // d_X before rescaling
  double normalization = 0; // ‖gammabar^* gammabar - 1‖
  double conjugate = 0;     // conjugate-equation residual
};

// Generator of hom(M, N) with gammabar^* gammabar = 1; the unit when M = N.
NormalizedGenerator choose_normalized_generator(const SimRelation& rel, int m_node, int n_node);

// Theta into special bimodules over the endomorphisms of the base node.
struct ThetaFunctor {
  int base = 0;
  std::vector<int> nodes;
  std::map<int, NormalizedGenerator> gens;
  std::map<int, FrobeniusAlgebra> algebras;  // Xbar_N (x) X_N
};

ThetaFunctor theta_bifunctor(const SimRelation& rel, int cls);
// Y in hom(n node, l node) as a Theta(l)-Theta(n) bimodule Xbar_l (x) (Y (x) X_n).
AlgBimodule theta_module(const ThetaFunctor& th, int l, int n, const Bimodule& y);
Intertwiner theta_morphism(const ThetaFunctor& th, int l, int n, const Intertwiner& t);

struct ThetaAudit {
  double modules = 0;         // axioms and specialness of every image
  double projection = 0;      // p over Theta(L) vs 1 (x) gammabar gammabar^* (x) 1
  double composition = 0;     // Theta(Z) (x)_Theta(L) Theta(Y) -> Theta(Z (x) Y) unitary module map
  double unit = 0;            // Theta(1_N) = regular Theta(N)
  double algebras = 0;        // Theta(N) special, standard residual
  bool injective = true;      // t -> 1 (x) t (x) 1
};

// Audits over all words whose corners lie in the class; `limit` caps the composable pairs checked.
ThetaAudit audit_theta(const SimRelation& rel, const ThetaFunctor& th, int limit = 12);

struct ClassRealization {
  ThetaFunctor theta;
  ThetaAudit audit;
  std::map<int, Extension> ext;
  std::map<int, StandardBimodule> standard;
  std::map<int, RealizationIso> iso;
  std::map<int, MoritaReport> morita;
};

ClassRealization realize_class(const SimRelation& rel, int cls, std::uint64_t seed = 42);

struct PhiImage {
  AlgBimodule theta;
  RelativeProduct inner;  // X_l (x)_Theta(l) Theta(Y)
  RelativeProduct outer;  // (...) (x)_Theta(n) Xbar_n
  const AlgBimodule& module() const { return outer.product; }
};

PhiImage phi_module(const ClassRealization& cr, int l, int n, const Bimodule& y);
Intertwiner phi_morphism(const ClassRealization& cr, int l, int n, const PhiImage& a, const PhiImage& b,
                         const Intertwiner& t);

struct HomRow {
  std::string left, right;
  int source = 0, theta = 0, phi = 0;
};

struct PhiReport {
  SimRelation relation;
  std::vector<ClassRealization> classes;
  std::vector<int> base;                   // base node per class
  std::vector<TracialAlgebra> targets;     // Phi(object)
  std::vector<std::vector<int>> node_offsets;  // per object: first target block of each node
  std::vector<IMat> word_images;           // Phi(word) multiplicity matrices
  std::vector<HomRow> table;
  int cross_class = 0;                     // nonzero corners between different classes
  double theta = 0;                        // worst Theta audit
  double realization = 0;                  // worst extension / iso / Morita residual
  double functoriality = 0;                // Phi(st) = Phi(s)Phi(t), Phi(t^*) = Phi(t)^*
  double unit_standard = 0;                // each unit summand is a standard algebra
  bool tables_match() const;
};

PhiReport phi_realize(const Presentation& b, int depth = 3, std::uint64_t seed = 42);

}  // namespace bimcalc
