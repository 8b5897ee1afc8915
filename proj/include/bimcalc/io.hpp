#pragma once

#include "bimcalc/decomposition.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace bimcalc::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Matrices are flat row-major lists of [re, im]; the shape always comes from context.
Json to_json(const TracialAlgebra& a);
Json to_json(const Mat& m);
Json to_json(const Element& x);
Json to_json(const Bimodule& x);
Json to_json(const Intertwiner& f);
Json to_json(const FrobeniusAlgebra& f);
Json to_json(const DualitySolution& s);
Json to_json(const AlgBimodule& m);
Json to_json(const Presentation& p);

TracialAlgebra algebra_from(const Json& j);
Mat matrix_from(const Json& j, int rows, int cols);
Element element_from(const Json& j, const TracialAlgebra& a);
Bimodule bimodule_from(const Json& j);
// Expected dom/cod are checked when given.
Intertwiner intertwiner_from(const Json& j, const Bimodule* dom = nullptr, const Bimodule* cod = nullptr);
FrobeniusAlgebra frobenius_from(const Json& j);
DualitySolution solution_from(const Json& j);
AlgBimodule module_from(const Json& j);
Presentation presentation_from(const Json& j);

Json load_file(const std::string& path);
// Replaces every {"$ref": path} by the file contents, paths relative to `dir`.
Json resolve(const Json& j, const std::string& dir);

struct Manifest {
  int schema = kSchemaVersion;
  std::string kind;  // algebra | bimodule | solution | module | fuse | presentation
  Json body;         // references resolved; top-level strings are references too
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
};

Manifest load_manifest(const std::string& path);

// Canonical text: two-space indentation and a trailing newline.
std::string dump(const Json& j);

}  // namespace bimcalc::io
