#include "locp/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace locp {

namespace {

void escape_string(const std::string& s, std::string& out) {
  out += '"';
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void dump_rec(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::null: out += "null"; break;
    case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
    case Json::value_t::number_integer:
      out += std::to_string(j.get<long long>());
      break;
    case Json::value_t::number_unsigned:
      out += std::to_string(j.get<unsigned long long>());
      break;
    case Json::value_t::number_float: {
      double d = j.get<double>();
      if (!std::isfinite(d)) throw IoError("canonical JSON forbids NaN/Inf");
      if (d == 0.0) d = 0.0;  // a signed zero would not survive reparsing
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      out += buf;
      break;
    }
    case Json::value_t::string: escape_string(j.get<std::string>(), out); break;
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& item : j) {
        if (!first) out += ',';
        first = false;
        dump_rec(item, out);
      }
      out += ']';
      break;
    }
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        escape_string(it.key(), out);
        out += ':';
        dump_rec(it.value(), out);
      }
      out += '}';
      break;
    }
    default: throw IoError("unsupported JSON value type");
  }
}

const Json& field(const Json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end()) throw IoError(std::string("missing JSON field '") + name + "'");
  return *it;
}

double number_at(const Json& j) {
  if (!j.is_number()) throw IoError("expected a JSON number");
  return j.get<double>();
}

std::vector<int> int_list(const Json& j) {
  if (!j.is_array()) throw IoError("expected a JSON array of integers");
  std::vector<int> out;
  for (const auto& item : j) {
    if (!item.is_number_integer() && !item.is_number_unsigned())
      throw IoError("expected a JSON integer");
    out.push_back(item.get<int>());
  }
  return out;
}

}  // namespace

std::string canonical_dump(const Json& j) {
  std::string out;
  dump_rec(j, out);
  return out;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse '" + path + "': " + e.what());
  }
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << canonical_dump(j) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

Json complex_to_json(const Complex& z) {
  return Json::array({z.real(), z.imag()});
}

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2)
    throw IoError("a complex number must be a [re, im] pair");
  return {number_at(j[0]), number_at(j[1])};
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw IoError("a matrix must be an array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = rows ? static_cast<int>(j[0].size()) : 0;
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols)
      throw IoError("matrix rows have inconsistent lengths");
    for (int c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

Json algebra_to_json(const BlockAlgebra& a) {
  return Json{{"blocks", a.block_dims}};
}

BlockAlgebra algebra_from_json(const Json& j) {
  return make_block_algebra(int_list(field(j, "blocks")));
}

Json element_to_json(const AlgebraElement& x) {
  Json blocks = Json::array();
  for (const Matrix& b : x.blocks) blocks.push_back(matrix_to_json(b));
  return Json{{"blocks", std::move(blocks)}};
}

AlgebraElement element_from_json(const Json& j) {
  const Json& blocks = field(j, "blocks");
  if (!blocks.is_array() || blocks.empty())
    throw IoError("an element needs at least one block");
  std::vector<int> dims;
  std::vector<Matrix> mats;
  for (const auto& b : blocks) {
    Matrix m = matrix_from_json(b);
    if (m.rows() != m.cols()) throw IoError("element blocks must be square");
    dims.push_back(static_cast<int>(m.rows()));
    mats.push_back(std::move(m));
  }
  AlgebraElement x{make_block_algebra(dims), std::move(mats)};
  return x;
}

Json domain_to_json(const QuantizedDomain& d) {
  return Json{{"dim", d.dim}, {"flag", d.flag}};
}

QuantizedDomain domain_from_json(const Json& j) {
  return make_quantized_domain(field(j, "dim").get<int>(),
                               int_list(field(j, "flag")));
}

Json map_to_json(const MultilinearMap& f) {
  Json values = Json::array();
  for (const Matrix& v : f.values) values.push_back(matrix_to_json(v));
  return Json{{"k", f.k},
              {"alpha_of", f.alpha_of},
              {"domain", algebra_to_json(f.domain)},
              {"codomain", domain_to_json(f.codomain)},
              {"values", std::move(values)}};
}

MultilinearMap map_from_json(const Json& j) {
  const BlockAlgebra a = algebra_from_json(field(j, "domain"));
  const QuantizedDomain d = domain_from_json(field(j, "codomain"));
  const int k = field(j, "k").get<int>();
  const std::vector<int> alpha = int_list(field(j, "alpha_of"));
  const Json& vals = field(j, "values");
  if (!vals.is_array()) throw IoError("map values must be an array");
  std::vector<Matrix> values;
  values.reserve(vals.size());
  for (const auto& v : vals) values.push_back(matrix_from_json(v));
  return make_multilinear_map(a, d, k, alpha, std::move(values));
}

Json algebra_matrix_to_json(const AlgebraMatrix& x) {
  Json entries = Json::array();
  for (const AlgebraElement& e : x.entries) entries.push_back(element_to_json(e));
  return Json{{"n", x.n}, {"entries", std::move(entries)}};
}

Json triple_to_json(const StinespringTriple& t) {
  Json reps = Json::array();
  for (int p = 0; p < t.m; ++p)
    for (int i = 0; i < t.domain.vec_dim; ++i)
      reps.push_back(Json{{"basis_index", i},
                          {"p", p + 1},
                          {"matrix", matrix_to_json(t.reps[p][i])}});
  return Json{
      {"k", t.k},
      {"alpha_of", t.alpha_of},
      {"domain", algebra_to_json(t.domain)},
      {"codomain", domain_to_json(t.codomain)},
      {"r", t.dim},
      {"flag", t.flag},
      {"V", matrix_to_json(t.V)},
      {"reps", std::move(reps)},
      {"embed", matrix_to_json(t.embed)},
      {"residuals",
       Json{{"gram_asymmetry", t.residuals.gram_asymmetry},
            {"gram_min_eig", t.residuals.gram_min_eig},
            {"well_definedness", t.residuals.well_definedness},
            {"reconstruction", t.residuals.reconstruction},
            {"representation", t.residuals.representation},
            {"commutation", t.residuals.commutation},
            {"flag_leak", t.residuals.flag_leak},
            {"contractivity", t.residuals.contractivity},
            {"v_norm", t.residuals.v_norm}}}};
}

StinespringTriple triple_from_json(const Json& j) {
  StinespringTriple t;
  t.domain = algebra_from_json(field(j, "domain"));
  t.codomain = domain_from_json(field(j, "codomain"));
  t.k = field(j, "k").get<int>();
  t.m = (t.k + 1) / 2;
  t.alpha_of = int_list(field(j, "alpha_of"));
  t.dim = field(j, "r").get<int>();
  t.flag = int_list(field(j, "flag"));
  if (static_cast<int>(t.flag.size()) != t.codomain.levels() ||
      (t.flag.empty() ? t.dim != 0 : t.flag.back() != t.dim))
    throw IoError("triple flag dims are inconsistent");
  t.V = matrix_from_json(field(j, "V"));
  if (t.V.rows() != t.dim || t.V.cols() != t.codomain.dim)
    throw IoError("triple V has the wrong shape");
  t.reps.assign(t.m, std::vector<Matrix>(t.domain.vec_dim,
                                         Matrix::Zero(t.dim, t.dim)));
  std::vector<std::vector<bool>> seen(t.m,
                                      std::vector<bool>(t.domain.vec_dim, false));
  for (const auto& entry : field(j, "reps")) {
    const int p = field(entry, "p").get<int>();
    const int i = field(entry, "basis_index").get<int>();
    if (p < 1 || p > t.m || i < 0 || i >= t.domain.vec_dim)
      throw IoError("triple rep entry out of range");
    Matrix m = matrix_from_json(field(entry, "matrix"));
    if (m.rows() != t.dim || m.cols() != t.dim)
      throw IoError("triple rep matrix has the wrong shape");
    t.reps[p - 1][i] = std::move(m);
    seen[p - 1][i] = true;
  }
  for (const auto& s : seen)
    for (const bool b : s)
      if (!b) throw IoError("triple reps are incomplete");
  t.embed = matrix_from_json(field(j, "embed"));
  const Json& res = field(j, "residuals");
  t.residuals.gram_asymmetry = number_at(field(res, "gram_asymmetry"));
  t.residuals.gram_min_eig = number_at(field(res, "gram_min_eig"));
  t.residuals.well_definedness = number_at(field(res, "well_definedness"));
  t.residuals.reconstruction = number_at(field(res, "reconstruction"));
  t.residuals.representation = number_at(field(res, "representation"));
  t.residuals.commutation = number_at(field(res, "commutation"));
  t.residuals.flag_leak = number_at(field(res, "flag_leak"));
  t.residuals.contractivity = number_at(field(res, "contractivity"));
  t.residuals.v_norm = number_at(field(res, "v_norm"));
  return t;
}

Json report_to_json(const MapCheckReport& r) {
  return Json{{"property", r.property},
              {"verdict", verdict_name(r.verdict)},
              {"residual", r.residual},
              {"witness", r.witness},
              {"params", r.params}};
}

Json certificate_to_json(const RNCertificate& c) {
  return Json{{"T", matrix_to_json(c.T)},
              {"Delta", matrix_to_json(c.Delta)},
              {"residuals", Json{{"reconstruction", c.reconstruction},
                                 {"commutant", c.commutant},
                                 {"contraction", c.contraction}}}};
}

RNCertificate certificate_from_json(const Json& j) {
  RNCertificate c;
  c.T = matrix_from_json(field(j, "T"));
  c.Delta = matrix_from_json(field(j, "Delta"));
  const Json& res = field(j, "residuals");
  c.reconstruction = number_at(field(res, "reconstruction"));
  c.commutant = number_at(field(res, "commutant"));
  c.contraction = number_at(field(res, "contraction"));
  return c;
}

Json spec_to_json(const InstanceSpec& s) {
  return Json{{"seed", s.seed},
              {"block_dims", s.block_dims},
              {"codomain_dim", s.codomain_dim},
              {"flag", s.flag},
              {"k", s.k},
              {"kind", kind_name(s.kind)},
              {"alpha_of", s.alpha_of},
              {"leg_budget", s.leg_budget},
              {"unital", s.unital},
              {"defect", s.defect}};
}

InstanceSpec spec_from_json(const Json& j) {
  InstanceSpec s;
  s.seed = field(j, "seed").get<std::uint64_t>();
  s.block_dims = int_list(field(j, "block_dims"));
  s.codomain_dim = field(j, "codomain_dim").get<int>();
  s.flag = int_list(field(j, "flag"));
  s.k = field(j, "k").get<int>();
  s.kind = kind_from_name(field(j, "kind").get<std::string>());
  if (j.contains("alpha_of")) s.alpha_of = int_list(j["alpha_of"]);
  if (j.contains("leg_budget")) s.leg_budget = j["leg_budget"].get<int>();
  if (j.contains("unital")) s.unital = j["unital"].get<bool>();
  if (j.contains("defect")) s.defect = j["defect"].get<std::string>();
  return s;
}

Json instance_to_json(const InstanceSpec& spec, const MultilinearMap& f) {
  return Json{{"meta", spec_to_json(spec)},
              {"algebra", algebra_to_json(f.domain)},
              {"domain", domain_to_json(f.codomain)},
              {"map", map_to_json(f)}};
}

MultilinearMap instance_from_json(const Json& j) {
  return map_from_json(field(j, "map"));
}

MultilinearMap map_from_any_json(const Json& j) {
  if (!j.is_object()) throw IoError("expected a JSON object");
  if (j.contains("map")) return instance_from_json(j);
  return map_from_json(j);
}

}  // namespace locp
