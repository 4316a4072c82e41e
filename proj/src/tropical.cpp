#include "thetaquant/tropical.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "thetaquant/errors.hpp"
#include "thetaquant/siegel.hpp"

namespace thetaquant {

void validate(const GeodesicRay& ray) {
  const int g = static_cast<int>(ray.a.rows());
  if (g < 1 || ray.a.cols() != g || ray.b.rows() != g || ray.b.cols() != g ||
      ray.lambda.size() != g)
    throw InvalidParamsError("ray needs square A, B and g rates");
  Eigen::FullPivLU<RMat> lu(ray.a);
  if (!lu.isInvertible()) throw InvalidParamsError("ray frame A must be invertible");
  if (sym_residual(RMat(ray.b * ray.a.transpose())) > 1e-10 * std::max(1.0, max_abs(ray.b)))
    throw InvalidParamsError("B A^T must be symmetric");
  if (ray.lambda.minCoeff() <= 0.0) throw InvalidParamsError("rates must be positive");
}

Mat omega_at(const GeodesicRay& ray, double s) {
  validate(ray);
  const RMat real_part = ray.b * ray.a.transpose();
  const RMat imag_part =
      ray.a * (2.0 * s * ray.lambda).array().exp().matrix().asDiagonal() * ray.a.transpose();
  Mat omega = real_part.cast<cd>() + iu * imag_part.cast<cd>();
  return 0.5 * (omega + omega.transpose());
}

std::vector<IVec> lattice_neighbors(const RMat& gram, const RVec& target, int radius,
                                    double tie_tol) {
  const int g = static_cast<int>(gram.rows());
  if (gram.cols() != g || target.size() != g) throw InvalidParamsError("dimension mismatch");
  Eigen::SelfAdjointEigenSolver<RMat> es(RMat(0.5 * (gram + gram.transpose())));
  const double lam_min = es.eigenvalues().minCoeff();
  const double lam_max = es.eigenvalues().maxCoeff();
  if (lam_min <= 0.0) throw InvalidParamsError("metric must be positive definite");
  if (radius <= 0) radius = static_cast<int>(std::ceil(2.0 + lam_max / lam_min));

  IVec center(g);
  for (int d = 0; d < g; ++d) center[d] = static_cast<int>(std::lround(target[d]));

  const auto dist2 = [&](const IVec& m) {
    const RVec diff = target - m.cast<double>();
    return diff.dot(gram * diff);
  };

  std::vector<IVec> box;
  IVec off = IVec::Constant(g, -radius);
  while (true) {
    box.push_back(center + off);
    int axis = g - 1;
    while (axis >= 0) {
      if (++off[axis] <= radius) break;
      off[axis] = -radius;
      --axis;
    }
    if (axis < 0) break;
  }
  double best_val = dist2(box.front());
  for (const IVec& m : box) best_val = std::min(best_val, dist2(m));
  std::vector<IVec> best;
  for (const IVec& m : box)
    if (dist2(m) <= best_val + tie_tol) best.push_back(m);

  for (const IVec& m : best)
    for (int d = 0; d < g; ++d)
      if (std::abs(m[d] - center[d]) >= radius)
        throw RadiusTooSmallError("a nearest lattice point touches the search boundary");

  std::sort(best.begin(), best.end(), [](const IVec& u, const IVec& v) {
    for (int d = 0; d < u.size(); ++d)
      if (u[d] != v[d]) return u[d] < v[d];
    return false;
  });
  return best;
}

bool tropical_divisor_membership(const RMat& gram, int k, const RVec& y, double tie_tol) {
  if (k < 1) throw InvalidParamsError("k must be >= 1");
  return lattice_neighbors(gram, RVec(static_cast<double>(k) * y), 0, tie_tol).size() >= 2;
}

std::vector<double> tropical_divisor_g1(int k) {
  if (k < 1) throw InvalidParamsError("k must be >= 1");
  std::vector<double> points;
  for (int j = 0; j < k; ++j) points.push_back((2.0 * j + 1.0) / (2.0 * k));
  return points;
}

namespace {

// Section value of sum_l c_l sigma^l rescaled by the dominant term
// magnitude: same zeros and phase behaviour, but immune to underflow when
// Im Omega is huge.
cd scaled_section(const LatticeData& data, const Vec& coeffs, const RVec& x, const RVec& y) {
  const int g = data.g;
  const RMat o1 = data.omega.real();
  const RMat o2 = data.omega.imag();
  Eigen::SelfAdjointEigenSolver<RMat> es(RMat(0.5 * (o2 + o2.transpose())));
  const double lam_min = es.eigenvalues().minCoeff();
  const int radius =
      std::max(2, static_cast<int>(std::ceil(std::sqrt(45.0 / (data.k * pi * lam_min)))) + 1);

  struct Term {
    double log_mag;
    double angle;
  };
  std::vector<Term> terms;
  double top = -std::numeric_limits<double>::infinity();
  for (long li = 0; li < coeffs.size(); ++li) {
    const cd c = coeffs[li];
    if (std::abs(c) == 0.0) continue;
    const IVec lv = index_to_charv(li, g, data.k);
    RVec a(g);
    for (int d = 0; d < g; ++d) a[d] = static_cast<double>(lv[d]) / data.k;
    IVec center(g);
    for (int d = 0; d < g; ++d) center[d] = static_cast<int>(std::lround(y[d] - a[d]));
    IVec off = IVec::Constant(g, -radius);
    while (true) {
      const IVec m = center + off;
      const RVec v = y - m.cast<double>() - a;
      const double log_mag = -data.k * pi * v.dot(o2 * v) + std::log(std::abs(c));
      const double angle = data.k * pi * v.dot(o1 * v) +
                           2.0 * data.k * pi * (m.cast<double>() + a).dot(x) + std::arg(c);
      terms.push_back({log_mag, angle});
      top = std::max(top, log_mag);
      int axis = g - 1;
      while (axis >= 0) {
        if (++off[axis] <= radius) break;
        off[axis] = -radius;
        --axis;
      }
      if (axis < 0) break;
    }
  }
  if (terms.empty()) throw InvalidParamsError("all section coefficients vanish");

  cd acc{0.0, 0.0};
  for (const Term& t : terms)
    if (t.log_mag - top > -45.0) acc += std::exp(t.log_mag - top) * std::exp(iu * t.angle);
  return acc * std::exp(-iu * pi * static_cast<double>(data.k) * x.dot(y));
}

struct Cell {
  double x0, y0, dx, dy;
};

class WindingTracker {
 public:
  WindingTracker(const LatticeData& data, const Vec& coeffs) : data_(data), coeffs_(coeffs) {}

  cd eval(double x, double y) const {
    return scaled_section(data_, coeffs_, RVec::Constant(1, x), RVec::Constant(1, y));
  }

  // Accumulated phase along the segment, adaptively refined until each
  // step turns by less than pi/2.
  // The transition across a tie line sharpens with Im Omega (swing width
  // ~ dist-to-zero / Im Omega), so the recursion must be allowed to go deep;
  // once a segment reaches floating-point scale the principal value is the
  // only sensible answer and a simple zero cannot hide a full wrap in it.
  double edge_phase(double x0, double y0, double x1, double y1, int depth) const {
    const cd va = eval(x0, y0);
    const cd vb = eval(x1, y1);
    if (std::abs(va) < 1e-12 || std::abs(vb) < 1e-12)
      throw ResolutionTooCoarseError("section vanishes at a winding sample");
    const double step = std::arg(vb / va);
    if (std::abs(step) < pi / 2.0) return step;
    if (std::hypot(x1 - x0, y1 - y0) < 1e-13) return step;
    if (depth >= 60) throw ResolutionTooCoarseError("phase step refinement exhausted");
    const double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
    return edge_phase(x0, y0, xm, ym, depth + 1) + edge_phase(xm, ym, x1, y1, depth + 1);
  }

  int winding(const Cell& c) const {
    double total = 0.0;
    total += edge_phase(c.x0, c.y0, c.x0 + c.dx, c.y0, 0);
    total += edge_phase(c.x0 + c.dx, c.y0, c.x0 + c.dx, c.y0 + c.dy, 0);
    total += edge_phase(c.x0 + c.dx, c.y0 + c.dy, c.x0, c.y0 + c.dy, 0);
    total += edge_phase(c.x0, c.y0 + c.dy, c.x0, c.y0, 0);
    return static_cast<int>(std::lround(total / (2.0 * pi)));
  }

 private:
  const LatticeData& data_;
  Vec coeffs_;
};

// Quadrisect with slightly irrational split fractions so refinement edges
// never land exactly on a zero; fall back across candidates, then give up.
void refine_cell(const WindingTracker& tracker, const Cell& cell, int depth, int max_depth,
                 std::vector<RVec>& out) {
  if (depth >= max_depth) {
    RVec p(2);
    p << cell.x0 + 0.5 * cell.dx, cell.y0 + 0.5 * cell.dy;
    out.push_back(p);
    return;
  }
  static constexpr double kSplits[] = {0.5381966011, 0.4913932022, 0.5227032961};
  for (double split : kSplits) {
    const double xs = cell.x0 + split * cell.dx;
    const double ys = cell.y0 + split * cell.dy;
    Cell parts[4] = {
        {cell.x0, cell.y0, xs - cell.x0, ys - cell.y0},
        {xs, cell.y0, cell.x0 + cell.dx - xs, ys - cell.y0},
        {cell.x0, ys, xs - cell.x0, cell.y0 + cell.dy - ys},
        {xs, ys, cell.x0 + cell.dx - xs, cell.y0 + cell.dy - ys},
    };
    try {
      int found = 0;
      for (const Cell& part : parts) {
        if (tracker.winding(part) != 0) {
          refine_cell(tracker, part, depth + 1, max_depth, out);
          ++found;
        }
      }
      if (found > 0) return;
      // Winding lost between levels: keep the current center.
      RVec p(2);
      p << cell.x0 + 0.5 * cell.dx, cell.y0 + 0.5 * cell.dy;
      out.push_back(p);
      return;
    } catch (const ResolutionTooCoarseError&) {
      continue;  // try the next split fraction
    }
  }
  throw ResolutionTooCoarseError("all refinement splits hit a vanishing sample");
}

}  // namespace

std::vector<RVec> theta_zero_locus(const LatticeData& data, const Vec& coeffs, int grid,
                                   int refine_depth) {
  validate(data);
  if (data.g != 1) throw InvalidParamsError("zero locus search is genus one");
  if (grid < 4) throw InvalidParamsError("grid must be >= 4");
  if (coeffs.size() != charv_count(data.g, data.k))
    throw InvalidParamsError("coefficient vector must have length k^g");

  WindingTracker tracker(data, coeffs);
  const double h = 1.0 / grid;
  std::vector<RVec> zeros;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      // Offset by half a cell so known rational zeros avoid the edges.
      const Cell cell{(i + 0.5) * h, (j + 0.5) * h, h, h};
      if (tracker.winding(cell) != 0) refine_cell(tracker, cell, 0, refine_depth, zeros);
    }
  }
  for (RVec& z : zeros) {
    z[0] -= std::floor(z[0]);
    z[1] -= std::floor(z[1]);
  }
  std::sort(zeros.begin(), zeros.end(), [](const RVec& u, const RVec& v) {
    if (u[1] != v[1]) return u[1] < v[1];
    return u[0] < v[0];
  });
  return zeros;
}

RescaledMetricResult rescaled_metric(const GeodesicRay& ray, double s) {
  validate(ray);
  const int g = static_cast<int>(ray.a.rows());
  const double top = ray.lambda.maxCoeff();
  RescaledMetricResult out;
  out.rescaled = std::exp(-2.0 * s * top) * siegel_metric(omega_at(ray, s));
  RMat proj = RMat::Zero(g, g);
  int rank = 0;
  for (int d = 0; d < g; ++d)
    if (top - ray.lambda[d] < 1e-12 * std::max(1.0, top)) {
      proj(d, d) = 1.0;
      ++rank;
    }
  out.limit_block = ray.a * proj * ray.a.transpose();
  out.limit_rank = rank;
  out.mixed_rates = rank < g;
  return out;
}

RMat halfline_rescaled_metric(const Mat& omega_dot) {
  if (!in_siegel(omega_dot)) throw InvalidParamsError("direction must lie in the Siegel space");
  const RMat o1 = omega_dot.real();
  const RMat o2 = 0.5 * (omega_dot.imag() + omega_dot.imag().transpose());
  const RMat o2_inv = Eigen::LLT<RMat>(o2).solve(RMat::Identity(o1.rows(), o1.cols()));
  return o1 * o2_inv * o1 + o2;
}

double hausdorff_circle(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw InvalidParamsError("Hausdorff distance needs nonempty sets");
  const auto point_dist = [](double x, double y) {
    const double d = std::abs((x - std::floor(x)) - (y - std::floor(y)));
    return std::min(d, 1.0 - d);
  };
  double worst = 0.0;
  for (const auto& [from, to] : {std::pair(&a, &b), std::pair(&b, &a)}) {
    for (double x : *from) {
      double nearest = 1.0;
      for (double y : *to) nearest = std::min(nearest, point_dist(x, y));
      worst = std::max(worst, nearest);
    }
  }
  return worst;
}

}  // namespace thetaquant
