// Writes the manifests under fixtures/. Rerun after changing the JSON format.
#include "bimcalc/io.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

using namespace bimcalc;
using io::Json;

namespace {

std::string dir;

void write(const std::string& name, const Json& j) {
  std::ofstream out(dir + "/" + name, std::ios::binary);
  out << io::dump(j);
}

Json manifest(const std::string& kind) { return Json{{"schema", io::kSchemaVersion}, {"kind", kind}}; }

Json algebra_manifest(const FrobeniusAlgebra& f) {
  Json j = manifest("algebra");
  j["frobenius"] = io::to_json(f);
  return j;
}

Json presentation(const IMat& k) {
  Json p;
  p["objects"] = Json::array({Json{{"name", "C"}, {"blocks", {1}}}, Json{{"name", "C+C"}, {"blocks", {1, 1}}}});
  p["generators"] = Json::array({Json{{"name", "x"}, {"source", "C"}, {"target", "C+C"}, {"mult", Json::array()}}});
  for (Eigen::Index r = 0; r < k.rows(); ++r) p["generators"][0]["mult"].push_back(Json::array({k(r, 0)}));
  Json j = manifest("presentation");
  j["presentation"] = p;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <dir>\n";
    return 2;
  }
  dir = argv[1];
  const TracialAlgebra c({1}), cc({1, 1});
  const double r2 = 1.0 / std::sqrt(2.0);

  write("trivial.json", algebra_manifest(trivial_algebra(c)));
  write("m2.json", algebra_manifest(matrix_algebra(2, r2)));
  write("z2.json", algebra_manifest(group_algebra(2, r2)));
  write("m2_scaled.json", algebra_manifest(matrix_algebra(2, 1.0)));

  FrobeniusAlgebra bad = matrix_algebra(2, r2);
  bad.mult.blocks[0](0, 1) += 0.25;
  write("corrupted.json", algebra_manifest(bad));

  IMat k(2, 2);
  k << 1, 2, 0, 1;
  Json b = manifest("bimodule");
  b["bimodule"] = io::to_json(Bimodule(TracialAlgebra({1, 2}), TracialAlgebra({2, 1}), k));
  write("bimodule.json", b);

  // Referenced from a manifest, so it carries no header.
  write("m2_algebra.json", io::to_json(matrix_algebra(2, r2)));
  Json mod = manifest("module");
  mod["module"] = io::to_json(regular_module(matrix_algebra(2, r2)));
  write("module.json", mod);

  IMat kx(2, 1);
  kx << 1, 1;
  Bimodule x(c, cc, kx);
  Json fu = manifest("fuse");
  fu["left"] = io::to_json(unit_bimodule(cc));
  fu["right"] = io::to_json(x);
  write("fuse_unit.json", fu);

  Json fm = manifest("fuse");
  fm["left"] = io::to_json(regular_module(matrix_algebra(2, r2)));
  fm["right"] = io::to_json(regular_module(matrix_algebra(2, r2)));
  write("fuse_modules.json", fm);

  Json ref = manifest("algebra");
  ref["frobenius"] = "m2_algebra.json";
  ref["tol"] = 1e-8;
  write("m2_ref.json", ref);

  IMat split(2, 1), joined(2, 1);
  split << 1, 0;
  joined << 1, 1;
  write("two_object.json", presentation(split));
  write("two_object_connected.json", presentation(joined));

  std::ofstream(dir + "/malformed.json", std::ios::binary) << "{\"schema\": 1, \"kind\": \"algebra\", \n";
  return 0;
}
