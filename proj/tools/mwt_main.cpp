// mwt: filter validation, harmonic analysis, and report emission for
// matrix-valued transfer operators on the circle.
//
// Exit codes: 0 success, 1 validation or analysis failure, 2 parse errors.
// All reports land in --out (default ./out); identical flags and seeds
// produce byte-identical files.

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <mwt/mwt.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mwt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitParse = 2;

std::string fmt17(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

json json_complex(Cplx z) { return json::array({z.real(), z.imag()}); }

json json_matrix(const Mat& c) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < c.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index col = 0; col < c.cols(); ++col) row.push_back(json_complex(c(r, col)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json json_poly(const MatTrigPoly& p) {
  json list = json::array();
  for (int k = p.k_min(); k <= p.k_max(); ++k) {
    const Mat c = p.coeff(k);
    if (c.isZero(0.0)) continue;
    list.push_back(json{{"k", k}, {"matrix", json_matrix(c)}});
  }
  if (list.empty())
    list.push_back(json{{"k", 0}, {"matrix", json_matrix(Mat::Zero(p.rows(), p.cols()))}});
  return list;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void append_matrix_row(std::string& line, const Mat& value) {
  for (Eigen::Index r = 0; r < value.rows(); ++r)
    for (Eigen::Index c = 0; c < value.cols(); ++c) {
      line += ',';
      line += fmt17(value(r, c).real());
      line += ',';
      line += fmt17(value(r, c).imag());
    }
}

std::string csv_entry_header(Eigen::Index rows, Eigen::Index cols) {
  std::string header;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      header += ",re" + std::to_string(r) + std::to_string(c);
      header += ",im" + std::to_string(r) + std::to_string(c);
    }
  return header;
}

// Grid CSV: j, s, x, then row-major re/im pairs.
void write_grid_csv(const fs::path& path, const GridFunction& grid) {
  std::string text = "j,s,x";
  if (!grid.values.empty()) text += csv_entry_header(grid.values.front().rows(), grid.values.front().cols());
  text += '\n';
  for (long long j = grid.j_min; j <= grid.j_max; ++j) {
    std::string line = std::to_string(j) + "," + std::to_string(grid.scale) + "," + fmt17(grid.point(j));
    append_matrix_row(line, grid.at(j));
    text += line;
    text += '\n';
  }
  write_text(path, text);
}

struct LoadedFilter {
  FilterFile file;
  Filter filter;
};

LoadedFilter load(const std::string& path) {
  FilterFile file = load_filter_file(path);
  Filter filter = to_filter(file);
  return {std::move(file), std::move(filter)};
}

MatTrigPoly resolve_harmonic(const LoadedFilter& lf, const std::string& name, int lattice_bound) {
  if (name == "identity") return MatTrigPoly::identity(lf.filter.dim());
  if (name == "correlation") return correlation_unit(lf.filter, lattice_bound);
  auto it = lf.file.harmonics.find(name);
  if (it == lf.file.harmonics.end())
    throw std::domain_error("filter file has no harmonic candidate named '" + name + "'");
  return it->second;
}

json el_to_json(const ELReport& el) {
  json eigenvalues = json::array();
  for (Cplx v : el.eigenvalues) eigenvalues.push_back(json_complex(v));
  json basis = json::array();
  for (const CVec& v : el.e1_basis) {
    json vec = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) vec.push_back(json_complex(v(i)));
    basis.push_back(std::move(vec));
  }
  return json{{"satisfied", el.satisfied},
              {"l", el.l},
              {"eigenvalues", std::move(eigenvalues)},
              {"e1_basis", std::move(basis)},
              {"tol", el.tol}};
}

int cmd_validate(const std::string& path, double tol, int grid, const fs::path& out_dir) {
  const LoadedFilter lf = load(path);
  double min_abs_det = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    const double x = (2.0 * i + 1.0) / (2.0 * grid);
    min_abs_det = std::min(min_abs_det, std::abs(lf.filter.poly().eval(x).determinant()));
  }
  const double residual = lf.filter.qmf_residual();
  const bool ok = residual <= tol;

  json report{{"filter", lf.file.name},
              {"d", lf.file.d},
              {"N", lf.file.N},
              {"qmf_residual", residual},
              {"tol", tol},
              {"qmf_ok", ok},
              {"el", el_to_json(lf.filter.el_report())},
              {"min_abs_det_on_grid", min_abs_det},
              {"grid_size", grid}};
  write_json(out_dir / "validate.json", report);

  std::cout << "filter " << lf.file.name << ": qmf_residual = " << residual << (ok ? " (ok)" : " (FAIL)")
            << "\nE(l): " << (lf.filter.el_report().satisfied ? "satisfied" : "not satisfied")
            << ", l = " << lf.filter.el_report().l << "\nmin |det m(x)| on grid: " << min_abs_det
            << std::endl;
  return ok ? kExitOk : kExitFailure;
}

int cmd_harmonic(const std::string& path, int degree, double tol, const fs::path& out_dir) {
  const LoadedFilter lf = load(path);
  const int bound = min_degree_bound(lf.filter);
  if (degree < 0) degree = std::max(1, bound);
  if (degree < bound) {
    std::cerr << "degree " << degree << " is below the invariance bound; minimal admissible K is "
              << bound << std::endl;
    return kExitFailure;
  }
  const TransitionMatrix tm = transition_matrix(lf.filter, degree, tol);
  const std::vector<HarmonicElement> basis = fixed_space(lf.filter, degree, tol);

  json eigenvalues = json::array();
  json peripheral = json::array();
  for (Cplx v : tm.eigenvalues) {
    eigenvalues.push_back(json_complex(v));
    if (std::abs(v) >= 1.0 - 1e-9) peripheral.push_back(json_complex(v));
  }
  json basis_json = json::array();
  for (const HarmonicElement& e : basis)
    basis_json.push_back(json{{"residual", e.residual},
                              {"hermitian", e.hermitian},
                              {"positivity_floor", e.positivity_floor},
                              {"coeffs", json_poly(e.poly)}});
  std::string verdict = "n/a";
  if (lf.file.d == 1) verdict = lawton_orthogonal(basis, 1e-8) ? "orthogonal" : "non-orthogonal";

  json report{{"filter", lf.file.name},
              {"degree", degree},
              {"dimension", basis.size()},
              {"eigenvalues", std::move(eigenvalues)},
              {"peripheral_eigenvalues", std::move(peripheral)},
              {"lawton_verdict", verdict},
              {"basis", std::move(basis_json)}};
  write_json(out_dir / "harmonic.json", report);

  std::cout << "filter " << lf.file.name << ": fixed-space dimension " << basis.size() << " at degree "
            << degree << "\nverdict: " << verdict << std::endl;
  return kExitOk;
}

int cmd_analyze_star(const std::string& path, const std::string& h_name, int degree, int depth,
                     int grid, double tol, int lattice, const fs::path& out_dir) {
  const LoadedFilter lf = load(path);
  if (degree < 0) degree = std::max(1, min_degree_bound(lf.filter));
  const MatTrigPoly unit = resolve_harmonic(lf, h_name, lattice);
  const std::vector<HarmonicElement> basis = fixed_space(lf.filter, degree);
  std::vector<MatTrigPoly> polys;
  for (const HarmonicElement& e : basis) polys.push_back(e.poly);

  StarOptions opt;
  opt.depth = depth;
  opt.grid_size = grid;
  opt.tol = tol;
  const OrthogonalityTable table = orthogonality_table(lf.filter, polys, unit, opt);

  std::string csv = "i,j,norm,gap\n";
  for (Eigen::Index i = 0; i < table.norms.rows(); ++i)
    for (Eigen::Index j = 0; j < table.norms.cols(); ++j)
      csv += std::to_string(i) + "," + std::to_string(j) + "," + fmt17(table.norms(i, j)) + "," +
             fmt17(table.gaps(i, j)) + "\n";
  write_text(out_dir / "star_table.csv", csv);

  json report{{"filter", lf.file.name},
              {"unit", h_name},
              {"degree", degree},
              {"depth", depth},
              {"grid_size", grid},
              {"dimension", basis.size()},
              {"max_diagonal_gap", table.norms.size() > 0 ? table.gaps.diagonal().maxCoeff() : 0.0}};
  write_json(out_dir / "star_summary.json", report);
  std::cout << "star table for " << lf.file.name << ": " << basis.size() << " basis elements"
            << std::endl;
  return kExitOk;
}

int cmd_analyze_cascade(const std::string& path, int scale, int range, int grid, int lattice,
                        double tol, const fs::path& out_dir) {
  const LoadedFilter lf = load(path);
  const Filter& m = lf.filter;
  const ELReport& el = m.el_report();
  if (!el.satisfied) {
    std::cerr << "cascade analysis requires the low-pass condition E(l)" << std::endl;
    return kExitFailure;
  }

  const GridFunction product = infinite_product_grid(m, scale, range, tol);
  write_grid_csv(out_dir / "cascade_product.csv", product);

  const Mat p0 = product.at(0);
  Mat e1_projection = Mat::Zero(m.dim(), m.dim());
  for (const CVec& v : el.e1_basis) e1_projection += v * v.adjoint();

  json summary{{"filter", lf.file.name},
               {"scale", scale},
               {"range", range},
               {"lattice_bound", lattice},
               {"el", el_to_json(el)},
               {"p0_idempotency_gap", operator_norm(p0 * p0 - p0)},
               {"p0_e1_projection_gap", operator_norm(p0 - e1_projection)}};

  json components = json::array();
  const int torus_scale = std::min(scale, 8);
  for (std::size_t j = 0; j < el.e1_basis.size(); ++j) {
    const CVec& v = el.e1_basis[j];
    const GridFunction phihat = scaling_function_grid(m, v, scale, range, 1e-8);
    write_grid_csv(out_dir / ("cascade_scaling_" + std::to_string(j) + ".csv"), phihat);

    const double norm_sq = scaling_l2_norm_sq(m, v, lattice);
    const MatTrigPoly corr = correlation_polynomial(m, v, lattice, 1e-12, /*l2_normalized=*/true);

    long long steps = 1;
    for (int s = 0; s < torus_scale; ++s) steps *= m.dilation();
    GridFunction corr_grid;
    corr_grid.base = m.dilation();
    corr_grid.scale = torus_scale;
    corr_grid.j_min = 0;
    corr_grid.j_max = steps - 1;
    corr_grid.kind = GridFunction::Kind::Matrix;
    for (long long i = 0; i < steps; ++i) corr_grid.values.push_back(corr.eval(corr_grid.point(i)));
    write_grid_csv(out_dir / ("cascade_correlation_" + std::to_string(j) + ".csv"), corr_grid);

    const double residual = verify_harmonic_grid(
        m, [&corr](double x) { return corr.eval(x); }, 64, 1);
    components.push_back(json{{"index", j},
                              {"scaling_l2_norm_sq", norm_sq},
                              {"refinement_residual", refinement_residual(m, phihat)},
                              {"correlation_harmonic_residual", residual},
                              {"correlation_coeffs", json_poly(corr)}});
  }
  summary["components"] = std::move(components);
  write_json(out_dir / "cascade_summary.json", summary);
  std::cout << "cascade grids written for " << lf.file.name << " (" << el.e1_basis.size()
            << " scaling components)" << std::endl;
  return kExitOk;
}

int cmd_analyze_solenoid(const std::string& path, const std::string& word_digits, double base,
                         int truncation, const std::string& h_name, int lattice,
                         const fs::path& out_dir) {
  const LoadedFilter lf = load(path);
  const Filter& m = lf.filter;
  if (!m.el_report().satisfied) {
    std::cerr << "solenoid atom analysis requires the low-pass condition E(l)" << std::endl;
    return kExitFailure;
  }
  const MatTrigPoly h = resolve_harmonic(lf, h_name, lattice);

  std::vector<int> digits;
  for (char c : word_digits) {
    if (c < '0' || c >= '0' + m.dilation()) {
      std::cerr << "word digit '" << c << "' outside 0.." << m.dilation() - 1 << std::endl;
      return kExitFailure;
    }
    digits.push_back(c - '0');
  }

  json words = json::array();
  Word w = make_word(m, base);
  for (std::size_t prefix = 0; prefix <= digits.size(); ++prefix) {
    if (prefix > 0) w = extend_word(w, digits[prefix - 1], m);
    const CylinderMass mass = cylinder_measure(m, h, w);
    const AtomCylinderComparison avc = atoms_vs_cylinder(m, h, w, truncation);

    double child_trace = 0.0;
    for (int digit = 0; digit < m.dilation(); ++digit)
      child_trace += cylinder_measure(m, h, extend_word(w, digit, m)).trace;

    json anchors = json::array();
    for (double a : w.anchors) anchors.push_back(a);
    words.push_back(json{{"digits", w.digits},
                         {"anchors", std::move(anchors)},
                         {"cylinder", json_matrix(mass.mass)},
                         {"trace", mass.trace},
                         {"children_trace_gap", std::abs(child_trace - mass.trace)},
                         {"atom_sum", json_matrix(avc.atom_sum)},
                         {"atom_gap", avc.gap},
                         {"truncation", truncation}});
  }

  json report{{"filter", lf.file.name},
              {"h", h_name},
              {"h_harmonic_residual", harmonic_residual(m, h)},
              {"base", base},
              {"words", std::move(words)}};
  write_json(out_dir / "solenoid.json", report);
  std::cout << "solenoid report for " << lf.file.name << ", word '" << word_digits << "'"
            << std::endl;
  return kExitOk;
}

int cmd_analyze_martingale(const std::string& path, int depth, int paths, std::uint64_t seed,
                           double base, const std::string& h_name, const std::string& h0_name,
                           const std::string& sampler, double threshold, int lattice,
                           const fs::path& out_dir) {
  const LoadedFilter lf = load(path);
  const Filter& m = lf.filter;
  const MatTrigPoly h = resolve_harmonic(lf, h_name, lattice);
  const MatTrigPoly h0 = h0_name.empty() ? h : resolve_harmonic(lf, h0_name, lattice);

  json paths_json = json::array();
  int below = 0;
  for (int p = 0; p < paths; ++p) {
    const std::uint64_t path_rng = path_seed(seed, static_cast<std::uint64_t>(p));
    Word w = make_word(m, base);
    Word sampled = (sampler == "trace") ? sample_path(m, h, base, depth, path_rng).word
                                        : uniform_word(m, base, depth, path_rng);
    json trace = json::array();
    double final_entry = std::numeric_limits<double>::quiet_NaN();
    int support_exit = -1;
    for (int k = 1; k <= depth; ++k) {
      w = extend_word(w, sampled.digits[static_cast<std::size_t>(k - 1)], m);
      try {
        const Mat value = martingale_value(m, h, h0, w);
        Eigen::JacobiSVD<Mat> svd(value);
        json diag = json::array();
        for (Eigen::Index i = 0; i < value.rows(); ++i) diag.push_back(value(i, i).real());
        trace.push_back(json{{"k", k},
                             {"diag", std::move(diag)},
                             {"min_singular_value", svd.singularValues()(value.rows() - 1)}});
        if (k == depth) final_entry = std::abs(value(0, 0));
      } catch (const std::domain_error&) {
        support_exit = k;
        break;
      }
    }
    if (!std::isnan(final_entry) && final_entry < threshold) ++below;
    paths_json.push_back(json{{"index", p},
                              {"digits", sampled.digits},
                              {"support_exit_depth", support_exit},
                              {"final_entry00", final_entry},
                              {"trace", std::move(trace)}});
  }

  const double fraction = paths > 0 ? static_cast<double>(below) / paths : 0.0;
  json report{{"filter", lf.file.name},
              {"h", h_name},
              {"h0", h0_name.empty() ? h_name : h0_name},
              {"sampler", sampler},
              {"depth", depth},
              {"paths", paths},
              {"seed", seed},
              {"base", base},
              {"threshold", threshold},
              {"fraction_final_entry00_below_threshold", fraction},
              {"paths_data", std::move(paths_json)}};
  write_json(out_dir / "martingale.json", report);
  std::cout << "martingale traces for " << lf.file.name << ": " << fraction * 100.0
            << "% of paths end below " << threshold << std::endl;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matrix transfer-operator toolkit for multiwavelet filters"};
  app.require_subcommand(1);

  std::string file;
  std::string out_dir = "out";
  double tol = 1e-8;
  int grid = 256;

  auto* validate = app.add_subcommand("validate", "QMF and low-pass validation of a filter file");
  validate->add_option("file", file)->required();
  validate->add_option("--tol", tol, "QMF residual tolerance");
  validate->add_option("--grid", grid, "evaluation grid size");
  validate->add_option("--out", out_dir, "output directory");

  int degree = -1;
  double harmonic_tol = 1e-9;
  auto* harmonic = app.add_subcommand("harmonic", "fixed space of the transfer operator");
  harmonic->add_option("file", file)->required();
  harmonic->add_option("--degree", degree, "coefficient degree bound K");
  harmonic->add_option("--tol", harmonic_tol, "eigenvalue-1 clustering tolerance");
  harmonic->add_option("--out", out_dir, "output directory");

  auto* analyze = app.add_subcommand("analyze", "star / cascade / solenoid / martingale reports");
  analyze->require_subcommand(1);

  std::string h_name = "identity";
  int star_depth = 14;
  double star_tol = 1e-9;
  int lattice = 1000;
  auto* star = analyze->add_subcommand("star", "pairwise star products of the fixed basis");
  star->add_option("file", file)->required();
  star->add_option("--h", h_name, "unit: identity, correlation, or a named harmonic");
  star->add_option("--degree", degree, "fixed-space degree bound");
  star->add_option("--depth", star_depth, "iteration depth cap");
  star->add_option("--grid", grid, "torus grid size");
  star->add_option("--tol", star_tol, "convergence tolerance");
  star->add_option("--lattice", lattice, "lattice bound when --h correlation");
  star->add_option("--out", out_dir, "output directory");

  int scale = 6, range = 4;
  double cascade_tol = 1e-12;
  auto* cascade = analyze->add_subcommand("cascade", "scaling map, scaling vectors, correlations");
  cascade->add_option("file", file)->required();
  cascade->add_option("--scale", scale, "grid scale s (step 1/N^s)");
  cascade->add_option("--range", range, "grid range [-T, T]");
  cascade->add_option("--grid", grid, "torus grid size for residual checks");
  cascade->add_option("--lattice", lattice, "correlation lattice bound");
  cascade->add_option("--tol", cascade_tol, "product convergence tolerance");
  cascade->add_option("--out", out_dir, "output directory");

  std::string word_digits = "0";
  double base = 0.0;
  int truncation = 1000;
  std::string solenoid_h = "correlation";
  auto* solenoid = analyze->add_subcommand("solenoid", "cylinder masses and atom sums");
  solenoid->add_option("file", file)->required();
  solenoid->add_option("--word", word_digits, "digit string of the word");
  solenoid->add_option("--base", base, "base point in [0,1)");
  solenoid->add_option("--truncation", truncation, "atom lattice truncation");
  solenoid->add_option("--h", solenoid_h, "unit: correlation (default), identity, or named");
  solenoid->add_option("--lattice", lattice, "lattice bound for --h correlation");
  solenoid->add_option("--out", out_dir, "output directory");

  int mart_depth = 30, mart_paths = 200;
  std::uint64_t seed = 7;
  std::string h0_name;
  std::string sampler = "uniform";
  double threshold = 1e-2;
  auto* martingale = analyze->add_subcommand("martingale", "martingale ratio traces along paths");
  martingale->add_option("file", file)->required();
  martingale->add_option("--depth", mart_depth, "path depth");
  martingale->add_option("--paths", mart_paths, "number of sampled paths");
  martingale->add_option("--seed", seed, "base RNG seed");
  martingale->add_option("--base", base, "base point in [0,1)");
  martingale->add_option("--h", h_name, "denominator harmonic");
  martingale->add_option("--h0", h0_name, "numerator harmonic (defaults to --h)");
  martingale->add_option("--sampler", sampler, "uniform (Bernoulli digits) or trace")
      ->check(CLI::IsMember({"uniform", "trace"}));
  martingale->add_option("--threshold", threshold, "summary threshold on |entry (1,1)|");
  martingale->add_option("--lattice", lattice, "lattice bound for correlation units");
  martingale->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(out_dir);
    if (validate->parsed()) return cmd_validate(file, tol, grid, out_dir);
    if (harmonic->parsed()) return cmd_harmonic(file, degree, harmonic_tol, out_dir);
    if (star->parsed())
      return cmd_analyze_star(file, h_name, degree, star_depth, grid, star_tol, lattice, out_dir);
    if (cascade->parsed())
      return cmd_analyze_cascade(file, scale, range, grid, lattice, cascade_tol, out_dir);
    if (solenoid->parsed())
      return cmd_analyze_solenoid(file, word_digits, base, truncation, solenoid_h, lattice, out_dir);
    if (martingale->parsed())
      return cmd_analyze_martingale(file, mart_depth, mart_paths, seed, base, h_name, h0_name,
                                    sampler, threshold, lattice, out_dir);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << std::endl;
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitFailure;
  }
  return kExitOk;
}
