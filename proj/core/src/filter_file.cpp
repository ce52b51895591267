#include "mwt/filter_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mwt {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

int require_int(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
  return v.get<int>();
}

Cplx parse_entry(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(where, "expected a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

Mat parse_matrix(const json& j, int d, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != d)
    fail(where, "expected " + std::to_string(d) + " rows");
  Mat out(d, d);
  for (int r = 0; r < d; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    const std::string row_where = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != d)
      fail(row_where, "expected " + std::to_string(d) + " columns");
    for (int c = 0; c < d; ++c)
      out(r, c) = parse_entry(row[static_cast<std::size_t>(c)],
                              row_where + "[" + std::to_string(c) + "]");
  }
  return out;
}

MatTrigPoly parse_coeff_list(const json& j, int d, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a nonempty coefficient list");
  std::set<int> seen;
  int k_lo = 0, k_hi = 0;
  std::map<int, Mat> entries;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string rec_where = where + "[" + std::to_string(i) + "]";
    const json& rec = j[i];
    if (!rec.is_object()) fail(rec_where, "expected an object {k, matrix}");
    const int k = require_int(rec, "k", rec_where);
    if (!seen.insert(k).second) fail(rec_where, "duplicate index k = " + std::to_string(k));
    entries.emplace(k, parse_matrix(require(rec, "matrix", rec_where), d, rec_where + ".matrix"));
    k_lo = std::min(k_lo, k);
    k_hi = std::max(k_hi, k);
  }
  k_lo = entries.begin()->first;
  k_hi = entries.rbegin()->first;
  std::vector<Mat> coeffs(static_cast<std::size_t>(k_hi - k_lo) + 1, Mat::Zero(d, d));
  for (const auto& [k, c] : entries) coeffs[static_cast<std::size_t>(k - k_lo)] = c;
  return MatTrigPoly(k_lo, std::move(coeffs));
}

json matrix_to_json(const Mat& c) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < c.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index col = 0; col < c.cols(); ++col)
      row.push_back(json::array({c(r, col).real(), c(r, col).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

json coeffs_to_json(const MatTrigPoly& p) {
  json list = json::array();
  for (int k = p.k_min(); k <= p.k_max(); ++k) {
    const Mat c = p.coeff(k);
    if (c.isZero(0.0)) continue;
    list.push_back(json{{"k", k}, {"matrix", matrix_to_json(c)}});
  }
  if (list.empty())
    list.push_back(json{{"k", 0}, {"matrix", matrix_to_json(Mat::Zero(p.rows(), p.cols()))}});
  return list;
}

}  // namespace

FilterFile parse_filter_file(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("root", "expected a JSON object");

  FilterFile file;
  const json& name = require(root, "name", "root");
  if (!name.is_string()) fail("name", "expected a string");
  file.name = name.get<std::string>();

  file.torus_dim = require_int(root, "torus_dim", "root");
  if (file.torus_dim != 1)
    fail("torus_dim", "only torus dimension 1 is supported in this version (got " +
                          std::to_string(file.torus_dim) + ")");
  file.d = require_int(root, "d", "root");
  if (file.d < 1) fail("d", "dimension must be >= 1");
  file.N = require_int(root, "N", "root");
  if (file.N < 2) fail("N", "dilation must be >= 2");

  file.coeffs = parse_coeff_list(require(root, "coeffs", "root"), file.d, "coeffs");

  if (auto it = root.find("harmonics"); it != root.end()) {
    if (!it->is_object()) fail("harmonics", "expected an object of named coefficient lists");
    for (const auto& [key, value] : it->items())
      file.harmonics.emplace(key, parse_coeff_list(value, file.d, "harmonics." + key));
  }
  return file;
}

FilterFile load_filter_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_filter_file(buffer.str());
}

std::string serialize_filter_file(const FilterFile& file) {
  json root;
  root["name"] = file.name;
  root["torus_dim"] = file.torus_dim;
  root["d"] = file.d;
  root["N"] = file.N;
  root["coeffs"] = coeffs_to_json(file.coeffs);
  if (!file.harmonics.empty()) {
    json h = json::object();
    for (const auto& [key, value] : file.harmonics) h[key] = coeffs_to_json(value);
    root["harmonics"] = std::move(h);
  }
  return root.dump(2) + "\n";
}

void save_filter_file(const FilterFile& file, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << serialize_filter_file(file);
}

Filter to_filter(const FilterFile& file) {
  if (file.coeffs.rows() != file.d)
    throw ParseError("coeffs: matrix dimension does not match d");
  return Filter(file.coeffs, file.N);
}

}  // namespace mwt
