#include "bimcalc/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace bimcalc::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) { fail(ErrorKind::Parse, what); }

const Json& member(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_error(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

int as_int(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) parse_error(what + " must be an integer");
  return j.get<int>();
}

double as_double(const Json& j, const std::string& what) {
  if (!j.is_number()) parse_error(what + " must be a number");
  return j.get<double>();
}

IMat int_matrix(const Json& j, int rows, int cols, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) parse_error(what + " must have " + std::to_string(rows) + " rows");
  IMat k(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      parse_error(what + " must have " + std::to_string(cols) + " columns");
    for (int c = 0; c < cols; ++c) {
      k(r, c) = as_int(row[static_cast<size_t>(c)], what);
      if (k(r, c) < 0) parse_error(what + " entries must be nonnegative");
    }
  }
  return k;
}

}  // namespace

Json to_json(const TracialAlgebra& a) {
  Json j;
  j["blocks"] = a.blocks;
  j["labels"] = a.labels;
  return j;
}

Json to_json(const Mat& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back({m(r, c).real(), m(r, c).imag()});
  return out;
}

Json to_json(const Element& x) {
  Json out = Json::array();
  for (const auto& m : x.mats) out.push_back(to_json(m));
  return out;
}

Json to_json(const Bimodule& x) {
  Json j;
  j["source"] = to_json(x.source);
  j["target"] = to_json(x.target);
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < x.mult.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < x.mult.cols(); ++c) row.push_back(x.mult(r, c));
    rows.push_back(row);
  }
  j["mult"] = rows;
  return j;
}

Json to_json(const Intertwiner& f) {
  Json j;
  j["dom"] = to_json(f.dom);
  j["cod"] = to_json(f.cod);
  Json blocks = Json::array();
  for (const auto& b : f.blocks) blocks.push_back(to_json(b));
  j["blocks"] = blocks;
  return j;
}

Json to_json(const FrobeniusAlgebra& f) {
  Json j;
  j["h"] = to_json(f.h);
  j["mult"] = to_json(f.mult);
  j["unit"] = to_json(f.unit);
  return j;
}

Json to_json(const DualitySolution& s) {
  Json j;
  j["x"] = to_json(s.x);
  j["xbar"] = to_json(s.xbar);
  j["gamma"] = to_json(s.gamma);
  j["gammabar"] = to_json(s.gammabar);
  return j;
}

Json to_json(const AlgBimodule& m) {
  Json j;
  j["left"] = to_json(m.left);
  j["right"] = to_json(m.right);
  j["x"] = to_json(m.x);
  j["l"] = to_json(m.l);
  j["r"] = to_json(m.r);
  return j;
}

Json to_json(const Presentation& p) {
  Json objs = Json::array(), gens = Json::array();
  for (size_t o = 0; o < p.objects.size(); ++o) {
    Json a = to_json(p.objects[o]);
    objs.push_back({{"name", p.names[o]}, {"blocks", a["blocks"]}, {"labels", a["labels"]}});
  }
  for (const auto& g : p.generators)
    gens.push_back({{"name", g.name}, {"source", p.names[static_cast<size_t>(g.source)]},
                    {"target", p.names[static_cast<size_t>(g.target)]}, {"mult", to_json(g.x)["mult"]}});
  return {{"objects", objs}, {"generators", gens}, {"add_conjugates", p.add_conjugates}};
}

TracialAlgebra algebra_from(const Json& j) {
  const Json& b = member(j, "blocks");
  if (!b.is_array() || b.empty()) parse_error("\"blocks\" must be a nonempty list");
  std::vector<int> sizes;
  for (const auto& s : b) {
    int v = as_int(s, "block size");
    if (v < 1) parse_error("block sizes must be positive");
    sizes.push_back(v);
  }
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    const Json& l = j.at("labels");
    if (!l.is_array() || (!l.empty() && l.size() != sizes.size())) parse_error("\"labels\" must match \"blocks\"");
    for (const auto& s : l) {
      if (!s.is_string()) parse_error("labels must be strings");
      labels.push_back(s.get<std::string>());
    }
  }
  return TracialAlgebra(sizes, labels);
}

Mat matrix_from(const Json& j, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows * cols)
    parse_error("matrix needs " + std::to_string(rows * cols) + " entries for shape " + std::to_string(rows) + "x" +
                std::to_string(cols));
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const Json& e = j[static_cast<size_t>(r * cols + c)];
      if (!e.is_array() || e.size() != 2) parse_error("complex entries are [re, im] pairs");
      m(r, c) = cplx(as_double(e[0], "real part"), as_double(e[1], "imaginary part"));
    }
  return m;
}

Element element_from(const Json& j, const TracialAlgebra& a) {
  if (!j.is_array() || static_cast<int>(j.size()) != a.size()) parse_error("element needs one matrix per block");
  std::vector<Mat> mats;
  for (int i = 0; i < a.size(); ++i) mats.push_back(matrix_from(j[static_cast<size_t>(i)], a.block(i), a.block(i)));
  return from_blocks(a, mats);
}

Bimodule bimodule_from(const Json& j) {
  TracialAlgebra src = algebra_from(member(j, "source"));
  TracialAlgebra tgt = algebra_from(member(j, "target"));
  return Bimodule(src, tgt, int_matrix(member(j, "mult"), tgt.size(), src.size(), "\"mult\""));
}

Intertwiner intertwiner_from(const Json& j, const Bimodule* dom, const Bimodule* cod) {
  Bimodule d = bimodule_from(member(j, "dom"));
  Bimodule c = bimodule_from(member(j, "cod"));
  if (dom && d != *dom) parse_error("intertwiner domain is " + describe(d) + ", expected " + describe(*dom));
  if (cod && c != *cod) parse_error("intertwiner codomain is " + describe(c) + ", expected " + describe(*cod));
  if (d.source != c.source || d.target != c.target) parse_error("intertwiner between different hom categories");
  const Json& blocks = member(j, "blocks");
  if (!blocks.is_array() || static_cast<int>(blocks.size()) != d.num_blocks())
    parse_error("intertwiner needs " + std::to_string(d.num_blocks()) + " blocks");
  Intertwiner f = zero_map(d, c);
  for (int jj = 0; jj < d.target.size(); ++jj)
    for (int i = 0; i < d.source.size(); ++i)
      f.block(jj, i) = matrix_from(blocks[static_cast<size_t>(d.index(jj, i))], c.k(jj, i), d.k(jj, i));
  return f;
}

FrobeniusAlgebra frobenius_from(const Json& j) {
  Bimodule h = bimodule_from(member(j, "h"));
  if (h.source != h.target) parse_error("Frobenius algebra must be an endomorphism bimodule");
  Bimodule hh = fused(h, h), u = unit_bimodule(h.source);
  return {h, intertwiner_from(member(j, "mult"), &hh, &h), intertwiner_from(member(j, "unit"), &u, &h)};
}

DualitySolution solution_from(const Json& j) {
  Bimodule x = bimodule_from(member(j, "x"));
  Bimodule xb = bimodule_from(member(j, "xbar"));
  if (xb.source != x.target || xb.target != x.source) parse_error("\"xbar\" must go the opposite way to \"x\"");
  Bimodule um = unit_bimodule(x.source), un = unit_bimodule(x.target);
  Bimodule xbx = fused(xb, x), xxb = fused(x, xb);
  return {x, xb, intertwiner_from(member(j, "gamma"), &um, &xbx), intertwiner_from(member(j, "gammabar"), &un, &xxb)};
}

AlgBimodule module_from(const Json& j) {
  AlgBimodule m;
  m.left = frobenius_from(member(j, "left"));
  m.right = frobenius_from(member(j, "right"));
  m.x = bimodule_from(member(j, "x"));
  Bimodule bx = fused(m.left.h, m.x), xa = fused(m.x, m.right.h);
  m.l = intertwiner_from(member(j, "l"), &bx, &m.x);
  m.r = intertwiner_from(member(j, "r"), &xa, &m.x);
  return m;
}

Presentation presentation_from(const Json& j) {
  Presentation p;
  const Json& objs = member(j, "objects");
  if (!objs.is_array() || objs.empty()) parse_error("\"objects\" must be a nonempty list");
  for (const auto& o : objs) {
    const Json& name = member(o, "name");
    if (!name.is_string()) parse_error("object names must be strings");
    p.names.push_back(name.get<std::string>());
    p.objects.push_back(algebra_from(o));
  }
  auto object_index = [&](const Json& ref) {
    if (ref.is_string()) {
      for (size_t o = 0; o < p.names.size(); ++o)
        if (p.names[o] == ref.get<std::string>()) return static_cast<int>(o);
      parse_error("unknown object \"" + ref.get<std::string>() + "\"");
    }
    int o = as_int(ref, "object index");
    if (o < 0 || o >= static_cast<int>(p.objects.size())) parse_error("object index out of range");
    return o;
  };
  if (j.contains("generators")) {
    for (const auto& g : j.at("generators")) {
      Generator gen;
      const Json& name = member(g, "name");
      if (!name.is_string()) parse_error("generator names must be strings");
      gen.name = name.get<std::string>();
      gen.source = object_index(member(g, "source"));
      gen.target = object_index(member(g, "target"));
      const TracialAlgebra &s = p.objects[static_cast<size_t>(gen.source)], &t = p.objects[static_cast<size_t>(gen.target)];
      gen.x = Bimodule(s, t, int_matrix(member(g, "mult"), t.size(), s.size(), "mult of " + gen.name));
      p.generators.push_back(gen);
    }
  }
  if (j.contains("add_conjugates")) {
    if (!j.at("add_conjugates").is_boolean()) parse_error("\"add_conjugates\" must be a boolean");
    p.add_conjugates = j.at("add_conjugates").get<bool>();
  }
  return p;
}

Json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    parse_error(path + ": " + e.what());
  }
}

namespace {

Json load_reference(const std::string& ref, const std::string& dir) {
  std::filesystem::path p(ref);
  if (p.is_relative()) p = std::filesystem::path(dir) / p;
  return resolve(load_file(p.string()), p.parent_path().string());
}

}  // namespace

Json resolve(const Json& j, const std::string& dir) {
  if (j.is_object() && j.size() == 1 && j.contains("$ref")) {
    if (!j.at("$ref").is_string()) parse_error("\"$ref\" must be a path");
    return load_reference(j.at("$ref").get<std::string>(), dir);
  }
  Json out = j;
  if (j.is_object()) {
    for (auto it = out.begin(); it != out.end(); ++it) it.value() = resolve(it.value(), dir);
  } else if (j.is_array()) {
    for (auto& e : out) e = resolve(e, dir);
  }
  return out;
}

Manifest load_manifest(const std::string& path) {
  Json j = load_file(path);
  const std::string dir = std::filesystem::path(path).parent_path().string();
  Manifest m;
  m.schema = as_int(member(j, "schema"), "\"schema\"");
  if (m.schema != kSchemaVersion) parse_error("unsupported schema version " + std::to_string(m.schema));
  const Json& kind = member(j, "kind");
  if (!kind.is_string()) parse_error("\"kind\" must be a string");
  m.kind = kind.get<std::string>();
  if (j.contains("tol")) m.tol = as_double(j.at("tol"), "\"tol\"");
  if (j.contains("seed")) {
    const Json& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) parse_error("\"seed\" must be a nonnegative integer");
    m.seed = s.get<std::uint64_t>();
  }
  // every field except the bookkeeping ones may be a file reference
  m.body = Json::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "schema" || it.key() == "kind" || it.key() == "tol" || it.key() == "seed") continue;
    m.body[it.key()] = it.value().is_string() ? load_reference(it.value().get<std::string>(), dir) : resolve(it.value(), dir);
  }
  return m;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace bimcalc::io
