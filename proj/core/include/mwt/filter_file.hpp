#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "mwt/filter.hpp"
#include "mwt/trigmat.hpp"

namespace mwt {

/// Parse failure with a field-path diagnostic ("coeffs[2].matrix: ...").
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// On-disk description of a filter: name, torus dimension (only 1 is
/// supported in this version, the field is validated loudly), matrix
/// dimension d, dilation N, the coefficient list, and optional named
/// harmonic candidates in the same coefficient format.
struct FilterFile {
  std::string name;
  int torus_dim = 1;
  int d = 1;
  int N = 2;
  MatTrigPoly coeffs;
  std::map<std::string, MatTrigPoly> harmonics;
};

FilterFile parse_filter_file(const std::string& text);
FilterFile load_filter_file(const std::string& path);

/// Lossless serialization: numbers round-trip exactly, key order and layout
/// are deterministic, so serialize(parse(serialize(f))) == serialize(f).
std::string serialize_filter_file(const FilterFile& file);
void save_filter_file(const FilterFile& file, const std::string& path);

Filter to_filter(const FilterFile& file);

}  // namespace mwt
