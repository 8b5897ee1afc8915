#include "bimcalc/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>

using namespace bimcalc;
using io::Json;

namespace {

struct Options {
  std::string manifest, out, report = "text";
  double tol = kDefaultTol;
  std::uint64_t seed = 42;
  int depth = 3;
  bool tol_given = false, seed_given = false;
};

// Named residuals and properties collected by a command.
class Report {
 public:
  Report(std::string command, std::string kind, double tol) : tol_(tol) {
    j_["command"] = std::move(command);
    j_["kind"] = std::move(kind);
    j_["tol"] = tol;
    j_["checks"] = Json::object();
    j_["properties"] = Json::object();
  }
  void check(const std::string& name, double residual) {
    const bool pass = residual < tol_;
    j_["checks"][name] = {{"residual", residual}, {"pass", pass}};
    ok_ = ok_ && pass;
    if (!pass) failed_.push_back(name);
  }
  void flag(const std::string& name, bool pass) { check(name, pass ? 0.0 : std::numeric_limits<double>::infinity()); }
  Json& property(const std::string& name) { return j_["properties"][name]; }
  bool ok() const { return ok_; }
  Json finish() {
    j_["ok"] = ok_;
    j_["failed"] = failed_;
    return j_;
  }

 private:
  Json j_;
  double tol_;
  bool ok_ = true;
  std::vector<std::string> failed_;
};

std::string text_value(const Json& v) {
  if (v.is_number_float()) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v.get<double>();
    return os.str();
  }
  return v.dump();
}

void print_text(const Json& r) {
  std::cout << r["command"].get<std::string>() << " (" << r["kind"].get<std::string>() << "), tol "
            << text_value(r["tol"]) << "\n";
  for (auto it = r["checks"].begin(); it != r["checks"].end(); ++it)
    std::cout << "  " << (it.value()["pass"].get<bool>() ? "ok   " : "FAIL ") << it.key() << " "
              << text_value(it.value()["residual"]) << "\n";
  for (auto it = r["properties"].begin(); it != r["properties"].end(); ++it)
    std::cout << "  " << it.key() << " = " << text_value(it.value()) << "\n";
  std::cout << (r["ok"].get<bool>() ? "ok" : "FAILED") << "\n";
}

void require_kind(const io::Manifest& m, std::initializer_list<const char*> kinds, const std::string& cmd) {
  std::string list;
  for (const char* k : kinds) {
    if (m.kind == k) return;
    list += std::string(list.empty() ? "" : ", ") + k;
  }
  fail(ErrorKind::Parse, cmd + " expects a manifest of kind " + list + ", got \"" + m.kind + "\"");
}

const Json& field(const io::Manifest& m, const char* key) {
  if (!m.body.contains(key)) fail(ErrorKind::Parse, std::string("manifest has no \"") + key + "\"");
  return m.body.at(key);
}

Json spectrum(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.adjoint()));
  Json out = Json::array();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

Json imat(const IMat& k) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < k.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < k.cols(); ++c) row.push_back(k(r, c));
    rows.push_back(row);
  }
  return rows;
}

void algebra_checks(Report& rep, const FrobeniusAlgebra& f, bool standard) {
  AlgebraReport r = verify_algebra(f, standard);
  rep.check("unit_left", r.unit_left);
  rep.check("unit_right", r.unit_right);
  rep.check("assoc", r.assoc);
  rep.check("frobenius", r.frobenius);
  rep.property("special_residual") = r.special;
  if (r.standard) rep.property("standard_residual") = *r.standard;
  if (r.dimension) rep.property("dimension") = *r.dimension;
}

Json cmd_verify(const io::Manifest& m, const Options& o, Json& artifact) {
  Report rep("verify", m.kind, o.tol);
  if (m.kind == "algebra") {
    algebra_checks(rep, io::frobenius_from(field(m, "frobenius")), true);
  } else if (m.kind == "bimodule") {
    Bimodule x = io::bimodule_from(field(m, "bimodule"));
    DualitySolution sol = solution_from_bases(x);
    ConjugateResiduals r = check_conjugate_equations(sol);
    rep.check("conjugate_left", r.r1);
    rep.check("conjugate_right", r.r2);
    rep.property("connected") = is_connected(x);
    rep.property("dimension") = solution_dimension(standardize(sol, std::max(o.tol, 1e-8)));
  } else if (m.kind == "solution") {
    DualitySolution sol = io::solution_from(field(m, "solution"));
    ConjugateResiduals r = check_conjugate_equations(sol);
    rep.check("conjugate_left", r.r1);
    rep.check("conjugate_right", r.r2);
    rep.property("standard_residual") = standard_residual(sol);
  } else if (m.kind == "module") {
    ModuleReport r = verify_module(io::module_from(field(m, "module")));
    rep.check("left_assoc", r.left_assoc);
    rep.check("left_unit", r.left_unit);
    rep.check("right_assoc", r.right_assoc);
    rep.check("right_unit", r.right_unit);
    rep.check("commute", r.commute);
    rep.property("special_residual") = r.special();
  } else if (m.kind == "presentation") {
    SimRelation rel = sim_relation(io::presentation_from(field(m, "presentation")), o.depth);
    rep.flag("reflexive", rel.reflexive);
    rep.flag("symmetric", rel.symmetric);
    rep.flag("transitive", rel.transitive);
    rep.property("words") = rel.words.size();
    rep.property("classes") = rel.classes.size();
  } else {
    require_kind(m, {"algebra", "bimodule", "solution", "module", "presentation"}, "verify");
  }
  (void)artifact;
  return rep.finish();
}

Json cmd_specialize(const io::Manifest& m, const Options& o, Json& artifact) {
  require_kind(m, {"algebra"}, "specialize");
  Report rep("specialize", m.kind, o.tol);
  FrobeniusAlgebra f = io::frobenius_from(field(m, "frobenius"));
  Specialized s = specialize(f, std::max(o.tol, 1e-8));
  rep.check("special", verify_algebra(s.algebra).special);
  rep.check("homomorphism", s.hom_residual);
  rep.check("eigenvalue_bound", std::max(0.0, s.bound - s.min_eig));
  rep.property("min_eig") = s.min_eig;
  rep.property("bound") = s.bound;
  artifact = {{"frobenius", io::to_json(s.algebra)}, {"iso", io::to_json(s.iso)}};
  return rep.finish();
}

Json cmd_standardize(const io::Manifest& m, const Options& o, Json& artifact) {
  require_kind(m, {"algebra", "bimodule", "solution"}, "standardize");
  Report rep("standardize", m.kind, o.tol);
  const double pre = std::max(o.tol, 1e-8);
  if (m.kind == "algebra") {
    FrobeniusAlgebra f = io::frobenius_from(field(m, "frobenius"));
    // Non-special input goes through specialize first; iso is the composite.
    const bool special = verify_algebra(f).special < pre;
    Specialized sp = special ? Specialized{f, identity(f.h), 0, 0, 0} : specialize(f, pre);
    Standardized s = standardize_algebra(sp.algebra, pre);
    Intertwiner iso = s.iso * sp.iso;
    rep.check("standard", s.standard_residual);
    rep.check("special", verify_algebra(s.algebra).special);
    rep.check("homomorphism", homomorphism_residual(f, s.algebra, iso));
    rep.property("specialized_first") = !special;
    rep.property("dimension") = s.dimension;
    artifact = {{"frobenius", io::to_json(s.algebra)}, {"iso", io::to_json(iso)}};
  } else {
    DualitySolution sol = m.kind == "bimodule" ? solution_from_bases(io::bimodule_from(field(m, "bimodule")))
                                               : io::solution_from(field(m, "solution"));
    DualitySolution st = standardize(sol, pre);
    rep.check("conjugate", check_conjugate_equations(st).max());
    rep.check("standard", standard_residual(st));
    rep.property("dimension") = solution_dimension(st);
    artifact = {{"solution", io::to_json(st)}};
  }
  return rep.finish();
}

Json cmd_fuse(const io::Manifest& m, const Options& o, Json& artifact) {
  require_kind(m, {"fuse"}, "fuse");
  Report rep("fuse", m.kind, o.tol);
  const Json &lj = field(m, "left"), &rj = field(m, "right");
  if (lj.contains("l") && rj.contains("l")) {
    AlgBimodule y = io::module_from(lj), x = io::module_from(rj);
    RelativeProduct p = rel_tensor(y, x, std::max(o.tol, 1e-8));
    ModuleReport r = verify_module(p.product);
    rep.check("projection", distance(p.p * p.p, p.p));
    rep.check("isometry", distance(adjoint(p.s) * p.s, identity(p.product.x)));
    rep.check("module_axioms", r.axioms());
    rep.property("rank") = p.product.x.dim();
    artifact = {{"module", io::to_json(p.product)}};
  } else {
    Bimodule y = io::bimodule_from(lj), x = io::bimodule_from(rj);
    require(y.source == x.target, ErrorKind::Structural, "cannot fuse " + describe(y) + " with " + describe(x));
    Bimodule yx = fused(y, x);
    Rng rng(o.seed);
    GramFusion g = fuse_gram_oracle(y, x, rng);
    rep.check("oracle", g.residual);
    rep.flag("oracle_shape", g.skeletal == yx);
    if (y == unit_bimodule(y.target)) rep.flag("left_unit", yx == x);
    if (x == unit_bimodule(x.source)) rep.flag("right_unit", yx == y);
    rep.property("dim") = yx.dim();
    artifact = {{"bimodule", io::to_json(yx)}};
  }
  return rep.finish();
}

Json cmd_realize(const io::Manifest& m, const Options& o, Json& artifact) {
  require_kind(m, {"algebra"}, "realize");
  Report rep("realize", m.kind, o.tol);
  FrobeniusAlgebra f = io::frobenius_from(field(m, "frobenius"));
  Extension e = extension_algebra(f, std::max(o.tol, 1e-8), o.seed);
  rep.check("closure", e.closure);
  rep.check("adjoint_formula", e.adjoint_formula);
  rep.check("star_isomorphism", e.star_iso);
  rep.check("center", e.center_match);
  rep.check("inclusion", e.inclusion_hom);
  rep.check("k_identity", e.k_identity);
  rep.check("k_commutes", e.k_commutes);
  StandardBimodule sx = standard_bimodule_X(e);
  rep.check("gamma", worst({sx.gamma_residual, sx.gammabar_residual, check_conjugate_equations(sx.solution).max()}));
  RealizationIso u = iso_u(e, sx);
  rep.check("u_unitary", u.unitary);
  rep.check("u_bimodular", u.bimodular);
  rep.check("u_unit", u.unit);
  rep.check("u_multiplication", u.mult);
  const bool special = verify_algebra(f).special < o.tol;
  if (special) {
    MoritaReport mr = morita_check(e, sx, u, std::max(o.tol, 1e-8));
    rep.check("morita_modules", mr.module_axioms);
    rep.check("xbar_x", mr.xbar_x);
    rep.check("x_xbar", mr.x_xbar);
    rep.flag("rank_p", mr.rank_p == mr.dim_l2n);
  }
  rep.property("special") = special;
  rep.property("special_gap") = u.special_gap;
  rep.property("n_blocks") = e.n.blocks;
  rep.property("dim_n") = e.n.dim();
  rep.property("center_dim") = e.center.size();
  rep.property("multiplicities") = e.mu;
  rep.property("inclusion") = imat(e.inclusion);
  rep.property("inclusion_injective") = e.inclusion_injective;
  rep.property("k_spectrum") = spectrum(e.k);
  artifact = {{"n", io::to_json(e.n)}, {"x", io::to_json(sx.x)}, {"solution", io::to_json(sx.solution)}};
  return rep.finish();
}

Json cmd_decompose(const io::Manifest& m, const Options& o, Json& artifact) {
  require_kind(m, {"presentation"}, "decompose");
  Report rep("decompose", m.kind, o.tol);
  Presentation p = io::presentation_from(field(m, "presentation"));
  PhiReport r = phi_realize(p, o.depth, o.seed);
  const SimRelation& rel = r.relation;
  rep.flag("equivalence", rel.reflexive && rel.symmetric && rel.transitive);
  rep.flag("hom_tables", r.tables_match());
  rep.flag("no_cross_class", r.cross_class == 0);
  rep.check("theta", r.theta);
  rep.check("realization", r.realization);
  rep.check("functoriality", r.functoriality);
  rep.check("unit_standard", r.unit_standard);
  auto node_name = [&](int a) {
    const Node& n = rel.nodes[static_cast<size_t>(a)];
    return p.names[static_cast<size_t>(n.object)] + "/" + std::to_string(n.component);
  };
  Json classes = Json::array();
  for (size_t c = 0; c < rel.classes.size(); ++c) {
    Json members = Json::array();
    for (int a : rel.classes[c]) {
      const Node& n = rel.nodes[static_cast<size_t>(a)];
      members.push_back({{"node", node_name(a)}, {"object", p.names[static_cast<size_t>(n.object)]}, {"blocks", n.blocks}});
    }
    const TracialAlgebra& base = rel.nodes[static_cast<size_t>(r.base[c])].algebra;
    classes.push_back({{"members", members}, {"base", node_name(r.base[c])}, {"base_blocks", base.blocks}});
  }
  Json targets = Json::object();
  for (size_t ob = 0; ob < p.objects.size(); ++ob) targets[p.names[ob]] = r.targets[ob].blocks;
  Json images = Json::array();
  for (size_t w = 0; w < rel.words.size(); ++w) {
    const Word& wd = rel.words[w];
    images.push_back({{"word", wd.name}, {"source", p.names[static_cast<size_t>(wd.source)]},
                      {"target", p.names[static_cast<size_t>(wd.target)]}, {"mult", imat(wd.x.mult)},
                      {"image", imat(r.word_images[w])}});
  }
  Json table = Json::array();
  for (const auto& row : r.table)
    table.push_back({{"left", row.left}, {"right", row.right}, {"source", row.source}, {"theta", row.theta}, {"phi", row.phi}});
  rep.property("classes") = classes.size();
  rep.property("words") = rel.words.size();
  rep.property("table_rows") = table.size();
  artifact = {{"classes", classes}, {"targets", targets}, {"images", images}, {"hom_table", table}};
  return rep.finish();
}

int run(const std::string& command, Options o) {
  io::Manifest m = io::load_manifest(o.manifest);
  if (!o.tol_given) {
    if (m.tol) {
      o.tol = *m.tol;
    } else if (const char* env = std::getenv("BIMCALC_TOL")) {
      try {
        o.tol = std::stod(env);
      } catch (const std::exception&) {
        fail(ErrorKind::Parse, std::string("BIMCALC_TOL is not a number: ") + env);
      }
    }
  }
  if (!o.seed_given && m.seed) o.seed = *m.seed;
  require(o.tol > 0, ErrorKind::Parse, "tolerance must be positive");
  require(o.depth >= 1, ErrorKind::Parse, "depth must be at least 1");

  Json artifact;
  Json report;
  if (command == "verify") report = cmd_verify(m, o, artifact);
  else if (command == "specialize") report = cmd_specialize(m, o, artifact);
  else if (command == "standardize") report = cmd_standardize(m, o, artifact);
  else if (command == "fuse") report = cmd_fuse(m, o, artifact);
  else if (command == "realize") report = cmd_realize(m, o, artifact);
  else report = cmd_decompose(m, o, artifact);

  if (!o.out.empty()) {
    if (artifact.is_null()) artifact = report;
    std::ofstream out(o.out, std::ios::binary);
    if (!out) fail(ErrorKind::Parse, "cannot write " + o.out);
    out << io::dump(artifact);
  }
  if (o.report == "json") std::cout << io::dump(report);
  else print_text(report);
  return report["ok"].get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bimodule calculus over finite-dimensional tracial algebras"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"verify", "check the axioms of an algebra, bimodule, solution, module or presentation"},
      {"specialize", "rescale a Frobenius algebra to a special one"},
      {"standardize", "standard solution or standard Frobenius algebra"},
      {"fuse", "fusion of bimodules, or relative tensor product of modules"},
      {"realize", "extension algebra N with H = Xbar (x)_N X"},
      {"decompose", "equivalence classes of unit summands and the realization tables"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("manifest", o.manifest, "manifest file")->required();
    sub->add_option("-o,--out", o.out, "write the result here");
    sub->add_option("--tol", o.tol, "residual tolerance (default BIMCALC_TOL, else 1e-9)");
    sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
    sub->add_option("--depth", o.depth, "fusion closure depth")->capture_default_str();
    sub->add_option("--report", o.report, "report format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  CLI::App* sub = app.get_subcommands().front();
  o.tol_given = sub->count("--tol") > 0;
  o.seed_given = sub->count("--seed") > 0;
  try {
    return run(sub->get_name(), o);
  } catch (const Error& e) {
    std::cerr << "bimcalc: " << e.what() << "\n";
    return (e.kind() == ErrorKind::Parse || e.kind() == ErrorKind::Structural) ? 2 : 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "bimcalc: malformed input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "bimcalc: " << e.what() << "\n";
    return 1;
  }
}
