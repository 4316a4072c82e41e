// Command-line front end: evaluation commands, verification suites with
// machine-readable reports, and plot-data emission.  Reports are
// byte-deterministic for a fixed config; wall time goes to stderr so it
// never perturbs archived output.
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "thetaquant/bks.hpp"
#include "thetaquant/errors.hpp"
#include "thetaquant/matrix_core.hpp"
#include "thetaquant/metaplectic.hpp"
#include "thetaquant/quadrature.hpp"
#include "thetaquant/random.hpp"
#include "thetaquant/siegel.hpp"
#include "thetaquant/theta.hpp"
#include "thetaquant/tropical.hpp"
#include "thetaquant/verify.hpp"
#include "thetaquant/weil_brezin.hpp"

using namespace thetaquant;
using ordered_json = nlohmann::ordered_json;

static_assert(std::endian::native == std::endian::little,
              "binary grid files are little-endian; add byte swapping for this platform");

namespace {

long ipow(int b, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigInvalidError("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Inline JSON, or @path to read the JSON from a file.
ordered_json parse_json_arg(const std::string& text) {
  const std::string body = (!text.empty() && text[0] == '@') ? slurp(text.substr(1)) : text;
  try {
    return ordered_json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigInvalidError(std::string("bad JSON argument: ") + e.what());
  }
}

bool is_complex_pair(const ordered_json& j) {
  return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number();
}

cd parse_complex_entry(const ordered_json& j) {
  if (j.is_number()) return cd{j.get<double>(), 0.0};
  if (is_complex_pair(j)) return cd{j[0].get<double>(), j[1].get<double>()};
  throw ConfigInvalidError("complex entries must be numbers or [re, im] pairs");
}

// Scalars and [re, im] pairs promote to 1x1; otherwise an array of rows
// whose entries are numbers or [re, im] pairs.  A row like [1, 0] holds two
// real entries; a single complex entry spells itself [[1, 0]].
Mat parse_cmat(const ordered_json& j) {
  if (j.is_number() || is_complex_pair(j)) return Mat::Constant(1, 1, parse_complex_entry(j));
  if (!j.is_array() || j.empty()) throw ConfigInvalidError("matrix argument must be a JSON array");
  const long rows = static_cast<long>(j.size());
  if (!j[0].is_array() || j[0].empty())
    throw ConfigInvalidError("matrix argument must be an array of rows");
  const long cols = static_cast<long>(j[0].size());
  Mat m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<long>(j[r].size()) != cols)
      throw ConfigInvalidError("matrix rows must all have the same length");
    for (long c = 0; c < cols; ++c) m(r, c) = parse_complex_entry(j[r][c]);
  }
  return m;
}

RMat parse_rmat(const ordered_json& j) {
  const Mat m = parse_cmat(j);
  if (m.imag().cwiseAbs().maxCoeff() > 0.0)
    throw ConfigInvalidError("expected a real matrix");
  return m.real();
}

// A lone scalar is a 1-vector; otherwise one entry per array element, each a
// number or [re, im] pair.  [a, b] therefore means two real components; a
// single complex component spells itself [[a, b]].
Vec parse_cvec(const ordered_json& j) {
  if (j.is_number()) return Vec::Constant(1, parse_complex_entry(j));
  if (!j.is_array() || j.empty()) throw ConfigInvalidError("vector argument must be a JSON array");
  Vec v(static_cast<long>(j.size()));
  for (long i = 0; i < v.size(); ++i) v[i] = parse_complex_entry(j[i]);
  return v;
}

RVec parse_rvec(const ordered_json& j) {
  const Vec v = parse_cvec(j);
  if (v.imag().cwiseAbs().maxCoeff() > 0.0) throw ConfigInvalidError("expected a real vector");
  return v.real();
}

IVec parse_ivec(const ordered_json& j) {
  const RVec v = parse_rvec(j);
  IVec out(v.size());
  for (long i = 0; i < v.size(); ++i) {
    const double r = std::round(v[i]);
    if (std::abs(v[i] - r) > 1e-9) throw ConfigInvalidError("expected integer entries");
    out[i] = static_cast<int>(r);
  }
  return out;
}

ordered_json complex_json(cd z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json cmat_json(const Mat& m) {
  ordered_json rows = ordered_json::array();
  for (long r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (long c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

ordered_json rmat_json(const RMat& m) {
  ordered_json rows = ordered_json::array();
  for (long r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (long c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

ordered_json cvec_json(const Vec& v) {
  ordered_json out = ordered_json::array();
  for (long i = 0; i < v.size(); ++i) out.push_back(complex_json(v[i]));
  return out;
}

void deliver(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw ConfigInvalidError("cannot write '" + out_path + "'");
  f << text;
}

std::string csv_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------- binary grids ----

void write_section_file(const std::string& path, const SampledSection& s) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigInvalidError("cannot write '" + path + "'");
  const long side = ipow(s.N, s.g);
  ordered_json header = {{"g", s.g}, {"k", s.k}, {"N", s.N}, {"W", side}, {"h", side}};
  f << header.dump() << '\n';
  for (long i = 0; i < s.data.size(); ++i) {
    const double re = s.data[i].real(), im = s.data[i].imag();
    f.write(reinterpret_cast<const char*>(&re), sizeof re);
    f.write(reinterpret_cast<const char*>(&im), sizeof im);
  }
  if (!f) throw ConfigInvalidError("short write to '" + path + "'");
}

SampledSection read_section_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigInvalidError("cannot read '" + path + "'");
  std::string header_line;
  if (!std::getline(f, header_line)) throw ConfigInvalidError("missing grid header line");
  ordered_json header;
  try {
    header = ordered_json::parse(header_line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigInvalidError(std::string("bad grid header: ") + e.what());
  }
  SampledSection s;
  s.g = header.at("g").get<int>();
  s.k = header.at("k").get<int>();
  s.N = header.at("N").get<int>();
  const long w = header.at("W").get<long>();
  const long h = header.at("h").get<long>();
  if (s.g < 1 || s.k < 1 || s.N < 1 || w != ipow(s.N, s.g) || h != ipow(s.N, s.g))
    throw ConfigInvalidError("grid header is inconsistent");
  s.data = Vec(w * h);
  for (long i = 0; i < s.data.size(); ++i) {
    double re = 0.0, im = 0.0;
    f.read(reinterpret_cast<char*>(&re), sizeof re);
    f.read(reinterpret_cast<char*>(&im), sizeof im);
    if (!f) throw ConfigInvalidError("grid file is shorter than its header promises");
    s.data[i] = cd{re, im};
  }
  return s;
}

ordered_json wb_to_json(const WBVector& v) {
  ordered_json comps = ordered_json::array();
  for (long li = 0; li < static_cast<long>(v.comps.size()); ++li) {
    const WBComponentGrid& comp = v.comps[static_cast<size_t>(li)];
    ordered_json base = ordered_json::array();
    for (long d = 0; d < comp.base.size(); ++d) base.push_back(comp.base[d]);
    ordered_json l = ordered_json::array();
    const IVec lv = index_to_charv(li, v.g, v.k);
    for (long d = 0; d < lv.size(); ++d) l.push_back(lv[d]);
    comps.push_back({{"l", l}, {"base", base}, {"extent", comp.extent}, {"values", cvec_json(comp.values)}});
  }
  return {{"g", v.g}, {"k", v.k}, {"N", v.N}, {"comps", comps}};
}

WBVector wb_from_json(const ordered_json& j) {
  WBVector v;
  v.g = j.at("g").get<int>();
  v.k = j.at("k").get<int>();
  v.N = j.at("N").get<int>();
  for (const auto& cj : j.at("comps")) {
    WBComponentGrid comp;
    comp.base = parse_ivec(cj.at("base"));
    comp.extent = cj.at("extent").get<int>();
    comp.values = parse_cvec(cj.at("values"));
    v.comps.push_back(std::move(comp));
  }
  return v;
}

// -------------------------------------------------------------- reports ----

ordered_json case_json(const CaseResult& c) {
  ordered_json out = {{"id", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance},
                      {"pass", c.passed}};
  if (!c.detail.empty()) out["detail"] = c.detail;
  return out;
}

double max_residual_of(const std::vector<CaseResult>& cases) {
  double worst = 0.0;
  for (const auto& c : cases) worst = std::max(worst, c.residual);
  return worst;
}

ordered_json report_json(const std::vector<SuiteReport>& reports, const RunConfig& config) {
  ordered_json conventions = ordered_json::object();
  for (const auto& [key, text] : convention_notes()) conventions[key] = text;
  ordered_json suites = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json cases = ordered_json::array();
    for (const auto& c : r.cases) cases.push_back(case_json(c));
    suites.push_back({{"suite", r.suite},
                      {"cases", cases},
                      {"max_residual", max_residual_of(r.cases)},
                      {"pass", r.passed}});
  }
  return {{"config", {{"g", config.g}, {"k", config.k}, {"seed", config.seed}}},
          {"conventions", conventions},
          {"suites", suites},
          {"overall_pass", all_passed(reports)}};
}

// ------------------------------------------------------------- commands ----

int cmd_theta_eval(int g, int k, const std::string& l_arg, const std::string& omega_arg,
                   const std::string& z_arg, double tol, const std::string& out) {
  LatticeData data;
  data.g = g;
  data.k = k;
  data.omega = parse_cmat(parse_json_arg(omega_arg));
  const IVec l = l_arg.empty() ? IVec(IVec::Zero(g)) : parse_ivec(parse_json_arg(l_arg));
  const Vec z = z_arg.empty() ? Vec(Vec::Zero(g)) : parse_cvec(parse_json_arg(z_arg));
  const ThetaResult r = theta_eval(data, l, z, tol);
  const ordered_json j = {{"value_re", r.value.real()},
                          {"value_im", r.value.imag()},
                          {"error_bound", r.error_bound}};
  deliver(out, j.dump(2) + "\n");
  return 0;
}

RMat assemble_symplectic(const ordered_json& mj) {
  const RMat a = parse_rmat(mj.at("A"));
  const RMat b = parse_rmat(mj.at("B"));
  const RMat c = parse_rmat(mj.at("C"));
  const RMat d = parse_rmat(mj.at("D"));
  const long g = a.rows();
  RMat m(2 * g, 2 * g);
  m.topLeftCorner(g, g) = a;
  m.topRightCorner(g, g) = b;
  m.bottomLeftCorner(g, g) = c;
  m.bottomRightCorner(g, g) = d;
  return m;
}

int cmd_siegel(bool apply, const std::string& in_arg, const std::string& out) {
  const ordered_json in = parse_json_arg(in_arg);
  const bool has_omega = in.contains("Omega");
  const bool has_tau = in.contains("tau");
  if (has_omega == has_tau)
    throw ConfigInvalidError("input needs exactly one of 'Omega' or 'tau'");
  const Mat point = parse_cmat(in.at(has_omega ? "Omega" : "tau"));
  const int g = static_cast<int>(point.rows());
  ordered_json j;
  if (apply) {
    const RMat m = assemble_symplectic(in.at("M"));
    if (has_omega)
      j = {{"g", g}, {"Omega", cmat_json(sp_act_H(m, point))}};
    else
      j = {{"g", g}, {"tau", cmat_json(sp_act_D(m, point))}};
  } else {
    if (has_omega)
      j = {{"g", g}, {"tau", cmat_json(cayley(point))}};
    else
      j = {{"g", g}, {"Omega", cmat_json(cayley_inverse(point))}};
  }
  deliver(out, j.dump(2) + "\n");
  return 0;
}

MetaplecticGenerator parse_generator(const ordered_json& j) {
  MetaplecticGenerator gen;
  gen.P = parse_rmat(j.at("P"));
  gen.L = parse_rmat(j.at("L"));
  gen.Q = parse_rmat(j.at("Q"));
  gen.m = j.contains("m") ? j.at("m").get<int>() : make_generator(gen.P, gen.L, gen.Q).m;
  validate(gen);
  return gen;
}

int cmd_mp_act(const std::string& gen_arg, const std::string& omega_arg, int k,
               const std::string& amp_arg, const std::string& out) {
  const MetaplecticGenerator gen = parse_generator(parse_json_arg(gen_arg));
  GaussianState state;
  state.g = static_cast<int>(gen.L.rows());
  state.k = k;
  state.omega = parse_cmat(parse_json_arg(omega_arg));
  state.amplitudes = amp_arg.empty() ? Vec(Vec::Ones(charv_count(state.g, k)))
                                     : parse_cvec(parse_json_arg(amp_arg));
  const GaussianState image = act_on_gaussian(gen, state);
  const BranchedScalar scalar = gaussian_action_scalar(gen, state.omega);
  const ordered_json j = {{"omega_prime", cmat_json(image.omega)},
                          {"scalar", complex_json(scalar.value)},
                          {"amplitudes", cvec_json(image.amplitudes)}};
  deliver(out, j.dump(2) + "\n");
  return 0;
}

int cmd_mp_verify_lemma(int k, std::uint64_t seed, int trials, double tol,
                        const std::string& out) {
  // Genus one: the integral operator with the explicit Gaussian kernel is
  // applied by quadrature and compared with the closed-form action.
  std::vector<CaseResult> cases;
  for (int trial = 0; trial < trials; ++trial) {
    auto rng = case_rng(seed, "mp/lemma-" + std::to_string(trial));
    const MetaplecticGenerator gen = random_generator(rng, 1);
    const Mat omega = random_siegel(rng, 1);
    GaussianState state;
    state.g = 1;
    state.k = k;
    state.amplitudes = Vec::Ones(k);
    state.omega = omega;
    const GaussianState image = act_on_gaussian(gen, state);

    const double p = gen.P(0, 0), q = gen.Q(0, 0), lmat = gen.L(0, 0);
    cd unit = 1.0;
    for (int t = 0; t < ((gen.m % 4) + 4) % 4; ++t) unit *= iu;
    const cd front = unit * std::sqrt(std::abs(lmat)) * std::sqrt(static_cast<double>(k)) *
                     std::exp(-iu * pi / 4.0);
    double worst = 0.0;
    for (double u : {0.2, -0.7}) {
      const cd lhs = trapezoid_nd(
          [&](const RVec& vv) {
            const double v = vv[0];
            const cd phase = iu * pi * static_cast<double>(k) *
                             (p * u * u - 2.0 * lmat * u * v + q * v * v);
            return front * std::exp(phase) *
                   std::exp(iu * pi * static_cast<double>(k) * omega(0, 0) * v * v);
          },
          1, 8.0, 2048);
      const cd rhs = image.amplitudes[0] *
                     std::exp(iu * pi * static_cast<double>(k) * image.omega(0, 0) * u * u);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300));
    }
    CaseResult quad;
    quad.name = "lemma-quadrature-" + std::to_string(trial);
    quad.residual = worst;
    quad.tolerance = tol;
    quad.passed = worst <= tol;
    cases.push_back(quad);

    const cd scalar = gaussian_action_scalar(gen, omega).value;
    const double norm_res = std::abs(std::norm(scalar) -
                                     std::sqrt(image.omega(0, 0).imag() / omega(0, 0).imag()));
    CaseResult norm;
    norm.name = "norm-preservation-" + std::to_string(trial);
    norm.residual = norm_res;
    norm.tolerance = tol;
    norm.passed = norm_res <= tol;
    cases.push_back(norm);
  }
  ordered_json per_case = ordered_json::array();
  bool pass = true;
  for (const auto& c : cases) {
    per_case.push_back(case_json(c));
    pass = pass && c.passed;
  }
  const ordered_json j = {{"max_residual", max_residual_of(cases)}, {"per_case", per_case}};
  deliver(out, j.dump(2) + "\n");
  return pass ? 0 : 1;
}

PairingParams route_params(const std::string& route, int points, int torus_n) {
  PairingParams params;
  if (route == "closed")
    params.route = PairingRoute::closed_form;
  else if (route == "quadrature")
    params.route = PairingRoute::wb_quadrature;
  else if (route == "torus")
    params.route = PairingRoute::torus_grid;
  else
    throw ConfigInvalidError("route must be closed, quadrature, or torus");
  params.quad_points = points;
  params.torus_n = torus_n;
  return params;
}

Mat parse_disc_point(const std::string& tau_arg, const std::string& omega_arg,
                     const char* which) {
  if (tau_arg.empty() == omega_arg.empty())
    throw ConfigInvalidError(std::string("give exactly one of --tau") + which + " or --omega" +
                             which);
  if (!tau_arg.empty()) return parse_cmat(parse_json_arg(tau_arg));
  return cayley(parse_cmat(parse_json_arg(omega_arg)));
}

int cmd_bks_gram(int k, const std::string& tau_arg, const std::string& omega_arg,
                 const std::string& tau2_arg, const std::string& omega2_arg,
                 const std::string& route, int points, int torus_n, const std::string& out) {
  const Mat tau = parse_disc_point(tau_arg, omega_arg, "");
  const PairingParams params = route_params(route, points, torus_n);
  Mat result;
  if (tau2_arg.empty() && omega2_arg.empty()) {
    result = frame_gram_matrix(tau, k, params);
  } else {
    result = frame_pairing_matrix(tau, parse_disc_point(tau2_arg, omega2_arg, "2"), k, params);
  }
  const ordered_json j = {{"k", k}, {"gram", cmat_json(result)}};
  deliver(out, j.dump(2) + "\n");
  return 0;
}

int cmd_bks_map(int k, const std::string& tau_arg, const std::string& omega_arg,
                const std::string& tau2_arg, const std::string& omega2_arg,
                const std::string& route, int points, int torus_n, const std::string& out) {
  const Mat tau = parse_disc_point(tau_arg, omega_arg, "");
  const Mat tau_p = parse_disc_point(tau2_arg, omega2_arg, "2");
  const Mat b = bks_map(tau, tau_p, k, route_params(route, points, torus_n));
  const ordered_json j = {{"k", k}, {"map", cmat_json(b)}};
  deliver(out, j.dump(2) + "\n");
  return 0;
}

int cmd_bks_verify(const std::string& suite, const RunConfig& config, const std::string& out) {
  std::string backing;
  std::string prefix;
  if (suite == "theorem") {
    backing = "bks";
  } else if (suite == "transitivity") {
    backing = "bks";
    prefix = "bks/map-";
  } else if (suite == "heisenberg" || suite == "intersection" || suite == "smatrix") {
    backing = suite;
  } else {
    throw UnknownSuiteError("no verification suite named '" + suite + "'");
  }
  const SuiteReport report = run_suite(backing, config);
  std::vector<CaseResult> kept;
  for (const auto& c : report.cases)
    if (prefix.empty() || c.name.rfind(prefix, 0) == 0) kept.push_back(c);
  ordered_json per_case = ordered_json::array();
  bool pass = true;
  for (const auto& c : kept) {
    per_case.push_back(case_json(c));
    pass = pass && c.passed;
  }
  const ordered_json j = {{"suite", suite},
                          {"max_residual", max_residual_of(kept)},
                          {"per_case", per_case}};
  deliver(out, j.dump(2) + "\n");
  return pass ? 0 : 1;
}

std::string divisor_csv(int g, int k, const std::string& gram_arg, int range) {
  std::string csv;
  if (g == 1) {
    csv = "y\n";
    for (double y : tropical_divisor_g1(k)) csv += csv_num(y) + "\n";
    return csv;
  }
  // Higher genus: emit the tie margin on a grid; the divisor is its zero
  // set, which generic grid points never hit exactly.
  if (gram_arg.empty()) throw ConfigInvalidError("genus >= 2 needs --G");
  const RMat gram = parse_rmat(parse_json_arg(gram_arg));
  if (gram.rows() != g) throw ConfigInvalidError("G must be g x g");
  for (int d = 0; d < g; ++d) csv += "y" + std::to_string(d + 1) + ",";
  csv += "margin\n";
  IVec idx = IVec::Zero(g);
  while (true) {
    RVec y(g);
    for (int d = 0; d < g; ++d) y[d] = static_cast<double>(idx[d]) / range;
    const RVec target = static_cast<double>(k) * y;
    // Two smallest squared distances over a generous lattice box.
    double best = std::numeric_limits<double>::infinity(), second = best;
    IVec center(g);
    for (int d = 0; d < g; ++d) center[d] = static_cast<int>(std::lround(target[d]));
    IVec off = IVec::Constant(g, -3);
    while (true) {
      RVec p(g);
      for (int d = 0; d < g; ++d) p[d] = center[d] + off[d];
      const RVec diff = p - target;
      const double d2 = diff.dot(gram * diff);
      if (d2 < best) {
        second = best;
        best = d2;
      } else if (d2 < second) {
        second = d2;
      }
      int d = g - 1;
      while (d >= 0 && ++off[d] > 3) off[d--] = -3;
      if (d < 0) break;
    }
    for (int d = 0; d < g; ++d) csv += csv_num(y[d]) + ",";
    csv += csv_num(second - best) + "\n";
    int d = g - 1;
    while (d >= 0 && ++idx[d] >= range) idx[d--] = 0;
    if (d < 0) break;
  }
  return csv;
}

GeodesicRay parse_ray(const std::string& ray_arg) {
  if (ray_arg.empty()) {
    return GeodesicRay{RMat::Identity(1, 1), RMat::Zero(1, 1), RVec::Ones(1)};
  }
  const ordered_json j = parse_json_arg(ray_arg);
  GeodesicRay ray;
  ray.a = parse_rmat(j.at("A"));
  ray.b = parse_rmat(j.at("B"));
  ray.lambda = parse_rvec(j.at("Lambda"));
  validate(ray);
  return ray;
}

Vec parse_coeffs(const std::string& arg, int g, int k) {
  if (arg.empty()) return Vec::Ones(charv_count(g, k));
  return parse_cvec(parse_json_arg(arg));
}

int cmd_tropical_compare(const std::string& ray_arg, double s, int k,
                         const std::string& coeffs_arg, double tol, const std::string& out) {
  const GeodesicRay ray = parse_ray(ray_arg);
  if (ray.a.rows() != 1) throw ConfigInvalidError("zero-locus comparison is genus one");
  LatticeData data;
  data.g = 1;
  data.k = k;
  data.omega = omega_at(ray, s);
  const auto zeros = theta_zero_locus(data, parse_coeffs(coeffs_arg, 1, k));
  const double hd = hausdorff_circle(project_to_y(zeros), tropical_divisor_g1(k));
  if (!out.empty()) {
    std::string csv = "s,y,x\n";
    for (const RVec& z : zeros)
      csv += csv_num(s) + "," + csv_num(z[1]) + "," + csv_num(z[0]) + "\n";
    deliver(out, csv);
  }
  const ordered_json j = {{"hausdorff_distance", hd}, {"s", s}, {"k", k}};
  std::fputs((j.dump(2) + "\n").c_str(), stdout);
  if (tol > 0.0 && hd > tol) return 1;
  return 0;
}

int cmd_verify(const std::string& suite, const RunConfig& config, const std::string& format,
               double tol_cap, const std::string& out) {
  const auto reports = run_suites(suite, config);
  if (format == "text")
    deliver(out, render_text_report(reports, config));
  else if (format == "json")
    deliver(out, report_json(reports, config).dump(2) + "\n");
  else
    throw ConfigInvalidError("format must be json or text");
  bool pass = all_passed(reports);
  if (tol_cap > 0.0)
    for (const auto& r : reports) pass = pass && max_residual_of(r.cases) <= tol_cap;
  return pass ? 0 : 1;
}

int cmd_emit(const std::string& kind, int g, int k, const std::string& omega_arg,
             const std::string& omega2_arg, int grid, const std::string& ray_arg,
             const std::string& s_arg, const std::string& coeffs_arg, std::uint64_t seed,
             const std::string& gram_arg, int range, const std::string& out) {
  if (kind == "theta_abs") {
    if (g != 1) throw InvalidParamsError("theta_abs emission is genus one");
    LatticeData data;
    data.g = 1;
    data.k = k;
    data.omega = omega_arg.empty() ? Mat(Mat::Constant(1, 1, iu))
                                   : parse_cmat(parse_json_arg(omega_arg));
    std::string csv = "x,y,abs\n";
    for (int jy = 0; jy < grid; ++jy)
      for (int jx = 0; jx < grid; ++jx) {
        const RVec x = RVec::Constant(1, static_cast<double>(jx) / grid);
        const RVec y = RVec::Constant(1, static_cast<double>(jy) / grid);
        const cd v = theta_section_eval(data, IVec::Zero(1), x, y, 1e-10).value;
        csv += csv_num(x[0]) + "," + csv_num(y[0]) + "," + csv_num(std::abs(v)) + "\n";
      }
    deliver(out, csv);
    return 0;
  }
  if (kind == "zero_locus") {
    const GeodesicRay ray = parse_ray(ray_arg);
    if (ray.a.rows() != 1) throw InvalidParamsError("zero_locus emission is genus one");
    std::vector<double> s_values;
    if (s_arg.empty()) {
      s_values = {3.0, 4.0};
    } else {
      const ordered_json sj = parse_json_arg(s_arg);
      if (sj.is_number()) {
        s_values.push_back(sj.get<double>());
      } else {
        for (const auto& e : sj) s_values.push_back(e.get<double>());
      }
    }
    const Vec coeffs = parse_coeffs(coeffs_arg, 1, k);
    std::string csv = "s,y,x\n";
    for (double s : s_values) {
      LatticeData data;
      data.g = 1;
      data.k = k;
      data.omega = omega_at(ray, s);
      for (const RVec& z : theta_zero_locus(data, coeffs))
        csv += csv_num(s) + "," + csv_num(z[1]) + "," + csv_num(z[0]) + "\n";
    }
    deliver(out, csv);
    return 0;
  }
  if (kind == "tropical_divisor") {
    deliver(out, divisor_csv(g, k, gram_arg, range));
    return 0;
  }
  if (kind == "gram_heatmap") {
    Mat omega, omega_p;
    if (!omega_arg.empty() && !omega2_arg.empty()) {
      omega = parse_cmat(parse_json_arg(omega_arg));
      omega_p = parse_cmat(parse_json_arg(omega2_arg));
    } else {
      auto rng = case_rng(seed, "emit/gram_heatmap");
      omega = random_siegel(rng, g);
      omega_p = random_siegel(rng, g);
    }
    PairingParams params;
    if (g <= 2) {
      params.route = PairingRoute::wb_quadrature;
      params.quad_points = g == 1 ? 2048 : 400;
    }
    const Mat p = frame_pairing_matrix(cayley(omega), cayley(omega_p), k, params);
    std::string csv = "i,j,re,im,abs\n";
    for (long i = 0; i < p.rows(); ++i)
      for (long j = 0; j < p.cols(); ++j)
        csv += std::to_string(i) + "," + std::to_string(j) + "," + csv_num(p(i, j).real()) +
               "," + csv_num(p(i, j).imag()) + "," + csv_num(std::abs(p(i, j))) + "\n";
    deliver(out, csv);
    return 0;
  }
  throw InvalidParamsError("kind must be theta_abs, zero_locus, tropical_divisor, or gram_heatmap");
}

}  // namespace

int main(int argc, char** argv) {
  const auto start = std::chrono::steady_clock::now();
  CLI::App app{"torus quantization toolkit: theta frames, polarization transport, and their "
               "verification oracles"};
  app.require_subcommand(1);
  int rc = 0;

  // --- theta ---
  auto* theta = app.add_subcommand("theta", "theta sections and lattice sums");
  theta->require_subcommand(1);
  auto* theta_eval_cmd = theta->add_subcommand("eval", "evaluate one theta value");
  struct {
    int g = 1, k = 1;
    std::string l, omega, z, out;
    double tol = 1e-12;
  } th;
  theta_eval_cmd->add_option("--g", th.g, "genus");
  theta_eval_cmd->add_option("--k", th.k, "level");
  theta_eval_cmd->add_option("--l", th.l, "characteristic (JSON ints or @file)");
  theta_eval_cmd->add_option("--omega", th.omega, "period matrix (JSON or @file)")->required();
  theta_eval_cmd->add_option("--z", th.z, "argument (JSON or @file)");
  theta_eval_cmd->add_option("--tol", th.tol, "series tail bound");
  theta_eval_cmd->add_option("--out", th.out, "output path (default stdout)");
  theta_eval_cmd->callback([&] { rc = cmd_theta_eval(th.g, th.k, th.l, th.omega, th.z, th.tol, th.out); });

  // --- siegel ---
  auto* siegel = app.add_subcommand("siegel", "period-domain charts and the group action");
  siegel->require_subcommand(1);
  struct {
    std::string in, out;
  } sg_cayley, sg_act;
  auto* siegel_cayley = siegel->add_subcommand("cayley", "convert between Omega and tau charts");
  siegel_cayley->add_option("--in", sg_cayley.in, "JSON {g, Omega|tau} (or @file)")->required();
  siegel_cayley->add_option("--out", sg_cayley.out, "output path (default stdout)");
  siegel_cayley->callback([&] { rc = cmd_siegel(false, sg_cayley.in, sg_cayley.out); });
  auto* siegel_act = siegel->add_subcommand("act", "apply a symplectic matrix in either chart");
  siegel_act->add_option("--in", sg_act.in, "JSON {g, Omega|tau, M:{A,B,C,D}} (or @file)")->required();
  siegel_act->add_option("--out", sg_act.out, "output path (default stdout)");
  siegel_act->callback([&] { rc = cmd_siegel(true, sg_act.in, sg_act.out); });

  // --- wb ---
  auto* wb = app.add_subcommand("wb", "grid transform between torus sections and components");
  wb->require_subcommand(1);
  struct {
    std::string in, in2, out;
    double tol = 1e-10;
  } wbo;
  auto* wb_fwd = wb->add_subcommand("forward", "binary section grid -> component JSON");
  wb_fwd->add_option("--in", wbo.in, "binary section file")->required();
  wb_fwd->add_option("--out", wbo.out, "output path (default stdout)");
  wb_fwd->callback([&] {
    const ordered_json j = wb_to_json(wb_forward(read_section_file(wbo.in)));
    deliver(wbo.out, j.dump(2) + "\n");
    rc = 0;
  });
  auto* wb_inv = wb->add_subcommand("inverse", "component JSON -> binary section grid");
  wb_inv->add_option("--in", wbo.in, "component JSON (or @file)")->required();
  wb_inv->add_option("--out", wbo.out, "binary section output path")->required();
  wb_inv->callback([&] {
    write_section_file(wbo.out, wb_inverse(wb_from_json(parse_json_arg(wbo.in))));
    rc = 0;
  });
  auto* wb_check = wb->add_subcommand("check", "pairing identity between the two sides");
  wb_check->add_option("--in", wbo.in, "binary section file")->required();
  wb_check->add_option("--in2", wbo.in2, "second section (default: same file)");
  wb_check->add_option("--tol", wbo.tol, "residual gate");
  wb_check->add_option("--out", wbo.out, "output path (default stdout)");
  wb_check->callback([&] {
    const SampledSection s = read_section_file(wbo.in);
    const SampledSection s2 = wbo.in2.empty() ? s : read_section_file(wbo.in2);
    const auto [torus, comps] = wb_unitarity_check(s, s2);
    const double residual = std::abs(torus - comps) /
                            std::max({std::abs(torus), std::abs(comps), 1e-300});
    const ordered_json j = {{"torus", complex_json(torus)},
                            {"components", complex_json(comps)},
                            {"residual", residual},
                            {"pass", residual <= wbo.tol}};
    deliver(wbo.out, j.dump(2) + "\n");
    rc = residual <= wbo.tol ? 0 : 1;
  });

  // --- mp ---
  auto* mp = app.add_subcommand("mp", "metaplectic generators acting on component states");
  mp->require_subcommand(1);
  struct {
    std::string gen, omega, amplitudes, out;
    int k = 1;
  } mpo;
  auto* mp_act = mp->add_subcommand("act", "apply one generator to a component state");
  mp_act->add_option("--gen", mpo.gen, "JSON {P,L,Q,m} (or @file)")->required();
  mp_act->add_option("--omega", mpo.omega, "period matrix of the state")->required();
  mp_act->add_option("--k", mpo.k, "level");
  mp_act->add_option("--amplitudes", mpo.amplitudes, "component amplitudes (default all ones)");
  mp_act->add_option("--out", mpo.out, "output path (default stdout)");
  mp_act->callback([&] { rc = cmd_mp_act(mpo.gen, mpo.omega, mpo.k, mpo.amplitudes, mpo.out); });
  struct {
    int k = 1, trials = 10;
    std::uint64_t seed = 1;
    double tol = 1e-6;
    std::string out;
  } mpl;
  auto* mp_lemma = mp->add_subcommand("verify-lemma", "closed form vs kernel quadrature, genus one");
  mp_lemma->add_option("--k", mpl.k, "level");
  mp_lemma->add_option("--seed", mpl.seed, "random seed");
  mp_lemma->add_option("--trials", mpl.trials, "number of random generators");
  mp_lemma->add_option("--tol", mpl.tol, "residual gate");
  mp_lemma->add_option("--out", mpl.out, "output path (default stdout)");
  mp_lemma->callback([&] { rc = cmd_mp_verify_lemma(mpl.k, mpl.seed, mpl.trials, mpl.tol, mpl.out); });

  // --- bks ---
  auto* bks = app.add_subcommand("bks", "frame pairings and polarization-change maps");
  bks->require_subcommand(1);
  struct {
    int k = 1, points = 2048, torus_n = 64;
    std::string tau, omega, tau2, omega2, route = "closed", out;
  } bko;
  auto* bks_gram = bks->add_subcommand("gram", "pairing matrix of the canonical frames");
  bks_gram->add_option("--k", bko.k, "level");
  bks_gram->add_option("--tau", bko.tau, "disc point (JSON)");
  bks_gram->add_option("--omega", bko.omega, "period matrix (JSON), alternative to --tau");
  bks_gram->add_option("--tau2", bko.tau2, "second disc point (default: same as first)");
  bks_gram->add_option("--omega2", bko.omega2, "second period matrix");
  bks_gram->add_option("--route", bko.route, "closed | quadrature | torus");
  bks_gram->add_option("--points", bko.points, "quadrature subintervals per dimension");
  bks_gram->add_option("--torus-n", bko.torus_n, "torus grid points per dimension");
  bks_gram->add_option("--out", bko.out, "output path (default stdout)");
  bks_gram->callback([&] {
    rc = cmd_bks_gram(bko.k, bko.tau, bko.omega, bko.tau2, bko.omega2, bko.route, bko.points,
                      bko.torus_n, bko.out);
  });
  auto* bks_map_cmd = bks->add_subcommand("map", "polarization-change matrix between two frames");
  bks_map_cmd->add_option("--k", bko.k, "level");
  bks_map_cmd->add_option("--tau", bko.tau, "source disc point (JSON)");
  bks_map_cmd->add_option("--omega", bko.omega, "source period matrix");
  bks_map_cmd->add_option("--tau2", bko.tau2, "target disc point (JSON)");
  bks_map_cmd->add_option("--omega2", bko.omega2, "target period matrix");
  bks_map_cmd->add_option("--route", bko.route, "closed | quadrature | torus");
  bks_map_cmd->add_option("--points", bko.points, "quadrature subintervals per dimension");
  bks_map_cmd->add_option("--torus-n", bko.torus_n, "torus grid points per dimension");
  bks_map_cmd->add_option("--out", bko.out, "output path (default stdout)");
  bks_map_cmd->callback([&] {
    rc = cmd_bks_map(bko.k, bko.tau, bko.omega, bko.tau2, bko.omega2, bko.route, bko.points,
                     bko.torus_n, bko.out);
  });
  struct {
    std::string suite, out;
    RunConfig config;
  } bkv;
  auto* bks_verify = bks->add_subcommand("verify", "named residual suites with a report");
  bks_verify->add_option("suite", bkv.suite,
                         "theorem | transitivity | heisenberg | intersection | smatrix")
      ->required();
  bks_verify->add_option("--g", bkv.config.g, "genus");
  bks_verify->add_option("--k", bkv.config.k, "level");
  bks_verify->add_option("--seed", bkv.config.seed, "random seed");
  bks_verify->add_option("--threads", bkv.config.threads, "worker threads (0 = auto)");
  bks_verify->add_option("--out", bkv.out, "output path (default stdout)");
  bks_verify->callback([&] { rc = cmd_bks_verify(bkv.suite, bkv.config, bkv.out); });

  // --- tropical ---
  auto* tropical = app.add_subcommand("tropical", "piecewise-linear limit data");
  tropical->require_subcommand(1);
  struct {
    int g = 1, k = 2, range = 64;
    std::string gram, out;
  } tdo;
  auto* trop_div = tropical->add_subcommand("divisor", "tie locus of the lattice distance");
  trop_div->add_option("--g", tdo.g, "genus");
  trop_div->add_option("--k", tdo.k, "level");
  trop_div->add_option("--G", tdo.gram, "Gram matrix (genus >= 2)");
  trop_div->add_option("--range", tdo.range, "grid resolution (genus >= 2)");
  trop_div->add_option("--out", tdo.out, "output path (default stdout)");
  trop_div->callback([&] {
    deliver(tdo.out, divisor_csv(tdo.g, tdo.k, tdo.gram, tdo.range));
    rc = 0;
  });
  struct {
    std::string ray, coeffs, out;
    double s = 3.0, tol = 0.0;
    int k = 2;
  } tco;
  auto* trop_cmp = tropical->add_subcommand("compare", "zero locus against the tie locus");
  trop_cmp->add_option("--ray", tco.ray, "JSON {A,B,Lambda} (default unit ray)");
  trop_cmp->add_option("--s", tco.s, "ray parameter");
  trop_cmp->add_option("--k", tco.k, "level");
  trop_cmp->add_option("--coeffs", tco.coeffs, "section coefficients (default all ones)");
  trop_cmp->add_option("--tol", tco.tol, "optional distance gate (exit 1 beyond it)");
  trop_cmp->add_option("--out", tco.out, "CSV output path for the zero list");
  trop_cmp->callback([&] { rc = cmd_tropical_compare(tco.ray, tco.s, tco.k, tco.coeffs, tco.tol, tco.out); });

  // --- verify ---
  struct {
    std::string suite = "all", format = "json", out;
    RunConfig config;
    double tol = 0.0;
  } vf;
  auto* verify = app.add_subcommand("verify", "run residual suites; exit 0 only if all pass");
  verify->add_option("suite", vf.suite, "suite name or 'all'");
  verify->add_option("--g", vf.config.g, "genus");
  verify->add_option("--k", vf.config.k, "level");
  verify->add_option("--seed", vf.config.seed, "random seed");
  verify->add_option("--threads", vf.config.threads, "worker threads (0 = auto)");
  verify->add_option("--format", vf.format, "json | text");
  verify->add_option("--tol", vf.tol, "optional extra cap on every residual");
  verify->add_option("--out", vf.out, "output path (default stdout)");
  verify->callback([&] { rc = cmd_verify(vf.suite, vf.config, vf.format, vf.tol, vf.out); });

  // --- emit ---
  struct {
    std::string kind, omega, omega2, ray, s, coeffs, gram, out;
    int g = 1, k = 1, grid = 128, range = 64;
    std::uint64_t seed = 1;
  } em;
  auto* emit = app.add_subcommand("emit", "CSV plot data");
  emit->add_option("kind", em.kind, "theta_abs | zero_locus | tropical_divisor | gram_heatmap")
      ->required();
  emit->add_option("--g", em.g, "genus");
  emit->add_option("--k", em.k, "level");
  emit->add_option("--omega", em.omega, "period matrix");
  emit->add_option("--omega2", em.omega2, "second period matrix (gram_heatmap)");
  emit->add_option("--grid", em.grid, "samples per dimension (theta_abs)");
  emit->add_option("--ray", em.ray, "JSON {A,B,Lambda} (zero_locus)");
  emit->add_option("--s", em.s, "ray parameter or JSON list (zero_locus)");
  emit->add_option("--coeffs", em.coeffs, "section coefficients (zero_locus)");
  emit->add_option("--seed", em.seed, "seed for the random pair (gram_heatmap)");
  emit->add_option("--G", em.gram, "Gram matrix (tropical_divisor, genus >= 2)");
  emit->add_option("--range", em.range, "grid resolution (tropical_divisor, genus >= 2)");
  emit->add_option("--out", em.out, "output path (default stdout)");
  emit->callback([&] {
    rc = cmd_emit(em.kind, em.g, em.k, em.omega, em.omega2, em.grid, em.ray, em.s, em.coeffs,
                  em.seed, em.gram, em.range, em.out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    rc = 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    rc = 2;
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  std::fprintf(stderr, "wall_time %.3fs\n", elapsed.count());
  return rc;
}
