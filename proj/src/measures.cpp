#include "steinlab/measures.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace steinlab {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310005;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double normal_pdf(double x, double sigma) {
  return std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * kSqrt2Pi);
}

}  // namespace

Vec GridAxis::nodes() const {
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = node(i);
  return x;
}

Vec GridAxis::trapezoid_weights() const {
  Vec w = Vec::Constant(n, h());
  w[0] *= 0.5;
  w[n - 1] *= 0.5;
  return w;
}

double GridDensity::mass() const { return integrate(Vec::Ones(p.size())); }

double GridDensity::integrate(const Vec& f_nodes) const {
  if (f_nodes.size() != p.size()) throw std::invalid_argument("integrate: size mismatch");
  if (dim == 1) {
    const Vec w = axis[0].trapezoid_weights();
    return (w.array() * p.array() * f_nodes.array()).sum();
  }
  const Vec w0 = axis[0].trapezoid_weights();
  const Vec w1 = axis[1].trapezoid_weights();
  const int n1 = axis[1].n;
  double s = 0.0;
  for (int i0 = 0; i0 < axis[0].n; ++i0) {
    double row = 0.0;
    for (int i1 = 0; i1 < n1; ++i1) row += w1[i1] * p[i0 * n1 + i1] * f_nodes[i0 * n1 + i1];
    s += w0[i0] * row;
  }
  return s;
}

double GridDensity::moment1d(int k) const {
  if (dim != 1) throw std::invalid_argument("moment1d: d=1 only");
  const Vec x = axis[0].nodes();
  Vec f(x.size());
  for (Index i = 0; i < x.size(); ++i) f[i] = std::pow(x[i], k);
  return integrate(f);
}

double GridDensity::variance() const {
  const double m1 = moment1d(1);
  return moment1d(2) - m1 * m1;
}

double GridDensity::eval(double x) const {
  if (dim != 1) throw std::invalid_argument("eval: d=1 only");
  const GridAxis& a = axis[0];
  if (x < a.lo || x > a.hi) return 0.0;
  const double t = (x - a.lo) / a.h();
  int i = std::min(static_cast<int>(std::floor(t)), a.n - 2);
  const double u = t - i;
  auto val = [&](int j) { return p[std::clamp(j, 0, a.n - 1)]; };
  const double p0 = val(i - 1), p1 = val(i), p2 = val(i + 1), p3 = val(i + 2);
  // Catmull-Rom
  return 0.5 * (2.0 * p1 + (-p0 + p2) * u + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u * u +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u * u * u);
}

GridDensity& GridDensity::normalize() {
  p /= mass();
  return *this;
}

GridDensity gaussian_1d(double sigma, const GridAxis& axis) {
  const double deficit = normal_cdf(axis.lo / sigma) + normal_cdf(-axis.hi / sigma);
  if (deficit > 1e-8)
    throw std::invalid_argument("gaussian_1d: grid too narrow (mass deficit " +
                                std::to_string(deficit) + ")");
  GridDensity g;
  g.dim = 1;
  g.axis[0] = axis;
  g.p.resize(axis.n);
  for (int i = 0; i < axis.n; ++i) g.p[i] = normal_pdf(axis.node(i), sigma);
  return g.normalize();
}

GridDensity standard_gaussian(int dim, const GridAxis& axis) {
  GridDensity g1 = gaussian_1d(1.0, axis);
  if (dim == 1) return g1;
  if (dim == 2) return product_density(g1, g1);
  throw std::invalid_argument("standard_gaussian: dim must be 1 or 2");
}

GridDensity uniform_1d(double half_width, int n_nodes) {
  GridDensity g;
  g.dim = 1;
  g.axis[0] = {-half_width, half_width, n_nodes};
  g.p = Vec::Constant(n_nodes, 1.0 / (2.0 * half_width));
  return g;
}

GridDensity smoothed_uniform_1d(double sigma, int n_nodes) {
  if (sigma <= 0.0 || sigma >= 1.0)
    throw std::invalid_argument("smoothed_uniform_1d: sigma in (0,1) required");
  const double a = std::sqrt(3.0 * (1.0 - sigma * sigma));
  GridDensity g;
  g.dim = 1;
  g.axis[0] = {-a - 8.0 * sigma, a + 8.0 * sigma, n_nodes};
  g.p.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    const double x = g.axis[0].node(i);
    g.p[i] = (normal_cdf((x + a) / sigma) - normal_cdf((x - a) / sigma)) / (2.0 * a);
  }
  return g.normalize();
}

GridDensity mixture_uniform_gauss(double a, double s, double smoothing, int n_nodes) {
  const double half = std::max({a + 8.5 * std::max(smoothing, 0.05), 8.5 * s, 6.0});
  GridDensity g;
  g.dim = 1;
  if (smoothing > 0.0) {
    g.axis[0] = {-half, half, n_nodes};
    g.p.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
      const double x = g.axis[0].node(i);
      const double pu =
          (normal_cdf((x + a) / smoothing) - normal_cdf((x - a) / smoothing)) / (2.0 * a);
      g.p[i] = 0.5 * pu + 0.5 * normal_pdf(x, s);
    }
  } else {
    // align +-a with nodes so the trapezoid rule sees the jumps exactly,
    // with the mean of the one-sided limits stored at the jump nodes
    const double h_target = 2.0 * half / (n_nodes - 1);
    const int m_in = std::max(8, static_cast<int>(std::lround(2.0 * a / h_target)));
    const double h = 2.0 * a / m_in;
    const int ext = static_cast<int>(std::ceil((half - a) / h));
    const int n = m_in + 2 * ext + 1;
    g.axis[0] = {-a - ext * h, a + ext * h, n};
    g.p.resize(n);
    for (int i = 0; i < n; ++i) {
      double pu = 0.0;
      if (i > ext && i < ext + m_in) pu = 1.0 / (2.0 * a);
      if (i == ext || i == ext + m_in) pu = 1.0 / (4.0 * a);
      g.p[i] = 0.5 * pu + 0.5 * normal_pdf(g.axis[0].node(i), s);
    }
  }
  return g.normalize();
}

GridDensity gaussian_mixture_1d(const Vec& weights, const Vec& means, const Vec& sigmas,
                                const GridAxis& axis) {
  GridDensity g;
  g.dim = 1;
  g.axis[0] = axis;
  g.p = Vec::Zero(axis.n);
  for (int i = 0; i < axis.n; ++i) {
    const double x = axis.node(i);
    for (Index c = 0; c < weights.size(); ++c)
      g.p[i] += weights[c] * normal_pdf(x - means[c], sigmas[c]);
  }
  return g.normalize();
}

GridDensity product_density(const GridDensity& f1, const GridDensity& f2) {
  if (f1.dim != 1 || f2.dim != 1)
    throw std::invalid_argument("product_density: factors must be 1-D");
  GridDensity g;
  g.dim = 2;
  g.axis[0] = f1.axis[0];
  g.axis[1] = f2.axis[0];
  g.p.resize(static_cast<Index>(f1.axis[0].n) * f2.axis[0].n);
  for (int i0 = 0; i0 < f1.axis[0].n; ++i0)
    for (int i1 = 0; i1 < f2.axis[0].n; ++i1) g.p[i0 * f2.axis[0].n + i1] = f1.p[i0] * f2.p[i1];
  return g;
}

SampleMeasure SampleMeasure::gaussian(int dim, Index n, std::uint64_t seed) {
  SampleMeasure m;
  m.dim = dim;
  m.seed = seed;
  m.points.resize(n, dim);
  std::mt19937_64 rng(seed);
  auto uniform01 = [&rng] { return ((rng() >> 11) + 0.5) * 0x1.0p-53; };
  bool have_spare = false;
  double spare = 0.0;
  auto draw = [&] {
    if (have_spare) {
      have_spare = false;
      return spare;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform01()));
    const double phi = 2.0 * M_PI * uniform01();
    spare = r * std::sin(phi);
    have_spare = true;
    return r * std::cos(phi);
  };
  for (Index i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) m.points(i, j) = draw();
  return m;
}

namespace {

MomentReport build_report(int dim, int max_degree,
                          const std::function<double(const MultiIndex&)>& mu_moment) {
  MomentReport rep;
  for (int k = 1; k <= max_degree; ++k) {
    for (const auto& alpha : multi_indices_of_degree(dim, k)) {
      MomentRow row;
      row.alpha = alpha;
      row.mu_moment = mu_moment(alpha);
      row.gamma_moment = gaussian_moment(alpha);
      row.diff = row.mu_moment - row.gamma_moment;
      if (!std::isfinite(row.mu_moment))
        throw std::runtime_error("moments: non-finite moment for alpha=" + alpha.str());
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

}  // namespace

MomentReport moments(const GridDensity& mu, int max_degree) {
  if (mu.dim == 1) {
    return build_report(1, max_degree,
                        [&](const MultiIndex& a) { return mu.moment1d(a[0]); });
  }
  // d=2: factor the power evaluation over the axes
  const Vec x0 = mu.axis[0].nodes(), x1 = mu.axis[1].nodes();
  const Vec w0 = mu.axis[0].trapezoid_weights(), w1 = mu.axis[1].trapezoid_weights();
  const int n1 = mu.axis[1].n;
  return build_report(2, max_degree, [&](const MultiIndex& a) {
    double s = 0.0;
    for (int i0 = 0; i0 < mu.axis[0].n; ++i0) {
      const double f0 = w0[i0] * std::pow(x0[i0], a[0]);
      double row = 0.0;
      for (int i1 = 0; i1 < n1; ++i1) row += w1[i1] * std::pow(x1[i1], a[1]) * mu.p[i0 * n1 + i1];
      s += f0 * row;
    }
    return s;
  });
}

MomentReport moments(const SampleMeasure& mu, int max_degree) {
  const Index n = mu.points.rows();
  return build_report(mu.dim, max_degree, [&](const MultiIndex& a) {
    double s = 0.0;
    for (Index i = 0; i < n; ++i) {
      double t = 1.0;
      for (int j = 0; j < mu.dim; ++j) t *= std::pow(mu.points(i, j), a[j]);
      s += t;
    }
    return s / static_cast<double>(n);
  });
}

double MomentReport::max_abs_diff(int max_degree) const {
  double m = 0.0;
  for (const auto& r : rows)
    if (r.alpha.degree() <= max_degree) m = std::max(m, std::abs(r.diff));
  return m;
}

const MomentRow* MomentReport::find(const MultiIndex& alpha) const {
  for (const auto& r : rows)
    if (r.alpha == alpha) return &r;
  return nullptr;
}

std::string MomentReport::summary(int max_degree) const {
  std::string s = "alpha  mu  gamma  diff\n";
  char buf[160];
  for (const auto& r : rows) {
    if (r.alpha.degree() > max_degree) continue;
    std::snprintf(buf, sizeof(buf), "%-6s %.10g %.10g %.3g\n", r.alpha.str().c_str(),
                  r.mu_moment, r.gamma_moment, r.diff);
    s += buf;
  }
  return s;
}

void require_moments_match(const GridDensity& mu, int max_degree, double tol) {
  const MomentReport rep = moments(mu, max_degree);
  for (const auto& r : rep.rows) {
    if (std::abs(r.diff) > tol) throw MomentMismatch(r.alpha.degree(), std::abs(r.diff));
  }
}

PoincareEstimate poincare_constant(const GridDensity& mu) {
  if (mu.dim != 1) throw std::invalid_argument("poincare_constant: d=1 only");
  const GridAxis& ax = mu.axis[0];
  const int n = ax.n;
  const double h = ax.h();
  for (int i = 1; i + 1 < n; ++i)
    if (mu.p[i] <= 0.0) throw DensityZero(ax.node(i));

  // P1 stiffness (Neumann natural) and lumped mass
  Vec pmid(n - 1);
  for (int i = 0; i + 1 < n; ++i) pmid[i] = 0.5 * (mu.p[i] + mu.p[i + 1]);
  const Vec w = ax.trapezoid_weights();
  Vec mass = (w.array() * mu.p.array()).matrix();

  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> trips;
  trips.reserve(3 * n);
  const double shift = 1e-9;  // relative to lambda1 = O(1)
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    if (i > 0) {
      diag += pmid[i - 1] / h;
      trips.emplace_back(i, i - 1, -pmid[i - 1] / h);
    }
    if (i + 1 < n) {
      diag += pmid[i] / h;
      trips.emplace_back(i, i + 1, -pmid[i] / h);
    }
    trips.emplace_back(i, i, diag + shift * mass[i]);
  }
  Eigen::SparseMatrix<double> ks(n, n);
  ks.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(ks);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("poincare_constant: factorization failed");

  auto stiffness_apply = [&](const Vec& f) {
    Vec y = Vec::Zero(n);
    for (int i = 0; i + 1 < n; ++i) {
      const double flux = pmid[i] * (f[i + 1] - f[i]) / h;
      y[i] -= flux;
      y[i + 1] += flux;
    }
    return y;
  };

  const double total_mass = mass.sum();
  auto deflate = [&](Vec& f) { f.array() -= (mass.dot(f)) / total_mass; };

  Vec f = ax.nodes();
  deflate(f);
  f /= std::sqrt(mass.dot(f.cwiseProduct(f)));
  double lambda = 0.0, rel_res = 1.0;
  for (int iter = 0; iter < 400; ++iter) {
    Vec g = solver.solve(mass.cwiseProduct(f));
    deflate(g);
    g /= std::sqrt(mass.dot(g.cwiseProduct(g)));
    lambda = g.dot(stiffness_apply(g)) / mass.dot(g.cwiseProduct(g));
    f = g;
    const Vec res = stiffness_apply(f) - lambda * mass.cwiseProduct(f);
    rel_res = res.norm() / (lambda * mass.cwiseProduct(f).norm());
    if (rel_res < 1e-11 && iter > 2) break;
  }
  if (!(lambda > 0.0)) throw std::runtime_error("poincare_constant: eigen-iteration failed");

  PoincareEstimate est;
  est.lambda1 = lambda;
  est.constant = 1.0 / lambda;
  est.grid_size = n;
  est.residual = rel_res;
  return est;
}

GridDensity smooth(const GridDensity& mu, double sigma) {
  if (mu.dim != 1) throw std::invalid_argument("smooth: d=1 only");
  if (sigma <= 0.0) throw std::invalid_argument("smooth: sigma > 0 required");
  const GridAxis& ax = mu.axis[0];
  const double h = ax.h();
  const int ext = static_cast<int>(std::ceil(8.0 * sigma / h));
  GridDensity out;
  out.dim = 1;
  out.axis[0] = {ax.lo - ext * h, ax.hi + ext * h, ax.n + 2 * ext};
  // kernel sampled on the shared lattice
  Vec kernel(2 * ext + 1);
  for (int d = -ext; d <= ext; ++d) kernel[d + ext] = normal_pdf(d * h, sigma);
  const Vec w = ax.trapezoid_weights();
  out.p = Vec::Zero(out.axis[0].n);
  for (int j = 0; j < ax.n; ++j) {
    const double m = w[j] * mu.p[j];
    if (m == 0.0) continue;
    for (int d = -ext; d <= ext; ++d) out.p[j + ext + d] += m * kernel[d + ext];
  }
  return out.normalize();
}

namespace {

// mixture moment map: m2, m4 of 1/2 (U(-a,a) * N(0,s0^2)) + 1/2 N(0,s^2)
Vec2 mixture_m24(double a, double s, double s0) {
  const double m2 = 0.5 * (a * a / 3.0 + s0 * s0) + 0.5 * s * s;
  const double m4 =
      0.5 * (std::pow(a, 4) / 5.0 + 2.0 * a * a * s0 * s0 + 3.0 * std::pow(s0, 4)) +
      1.5 * std::pow(s, 4);
  return Vec2(m2 - 1.0, m4 - 3.0);
}

}  // namespace

MatchResult match_moments(const FamilySpec& family, int target_degree) {
  using Kind = FamilySpec::Kind;
  if (family.kind == Kind::symmetric_uniform) {
    if (target_degree > 3) throw NoSolution(std::abs(9.0 / 5.0 - 3.0));
    MatchResult r;
    r.params = Vec::Constant(1, std::sqrt(3.0));
    r.density = family.smoothing > 0.0 ? smoothed_uniform_1d(family.smoothing, family.n_nodes)
                                       : uniform_1d(std::sqrt(3.0), family.n_nodes);
    r.residual = 0.0;
    return r;
  }

  if (family.kind == Kind::uniform_gauss_mixture) {
    if (target_degree > 5) throw NoSolution(1.0);
    const double s0 = family.smoothing;
    double a, s;
    if (target_degree <= 3) {
      s = 0.5;
      a = std::sqrt(3.0 * (2.0 - s * s - s0 * s0));
    } else {
      // damped Newton on (m2 - 1, m4 - 3)
      a = 1.6;
      s = 1.0;
      Vec2 f = mixture_m24(a, s, s0);
      for (int iter = 0; iter < 80 && f.norm() > 1e-13; ++iter) {
        Eigen::Matrix2d jac;
        jac(0, 0) = a / 3.0;
        jac(0, 1) = s;
        jac(1, 0) = 2.0 * a * a * a / 5.0 + 2.0 * a * s0 * s0;
        jac(1, 1) = 6.0 * s * s * s;
        const Vec2 step = jac.fullPivLu().solve(f);
        double damp = 1.0;
        for (; damp > 1e-6; damp *= 0.5) {
          const double an = std::clamp(a - damp * step[0], 0.05, 6.0);
          const double sn = std::clamp(s - damp * step[1], 0.05, 4.0);
          if (mixture_m24(an, sn, s0).norm() <= (1.0 - 0.25 * damp) * f.norm()) {
            a = an;
            s = sn;
            break;
          }
        }
        if (damp <= 1e-6) break;
        f = mixture_m24(a, s, s0);
      }
      if (f.norm() > 1e-10) throw NoSolution(f.norm());
    }
    MatchResult r;
    r.params = Vec(2);
    r.params << a, s;
    r.residual = mixture_m24(a, s, s0).norm();
    r.density = mixture_uniform_gauss(a, s, s0, family.n_nodes);
    return r;
  }

  // gaussian scale mixture 1/2 N(0,s1^2) + 1/2 N(0,s2^2), non-degenerate box:
  // excess kurtosis is strictly positive off the diagonal, so degree-4
  // matching must fail
  double s1 = 0.6, s2 = 1.3;
  auto fval = [&](double t1, double t2) {
    Vec2 f;
    f[0] = 0.5 * (t1 * t1 + t2 * t2) - 1.0;
    f[1] = 1.5 * (std::pow(t1, 4) + std::pow(t2, 4)) - 3.0;
    return f;
  };
  if (target_degree <= 3) {
    // one constraint, solvable: keep the ratio, scale to unit variance
    const double scale = std::sqrt(2.0 / (s1 * s1 + s2 * s2));
    s1 *= scale;
    s2 *= scale;
    MatchResult r;
    r.params = Vec(2);
    r.params << s1, s2;
    r.residual = 0.0;
    Vec wts(2), mns(2), sgs(2);
    wts << 0.5, 0.5;
    mns << 0.0, 0.0;
    sgs << s1, s2;
    r.density = gaussian_mixture_1d(wts, mns, sgs, {-8.0 * std::max(1.0, s2), 8.0 * std::max(1.0, s2), family.n_nodes});
    return r;
  }
  Vec2 f = fval(s1, s2);
  for (int iter = 0; iter < 80 && f.norm() > 1e-13; ++iter) {
    Eigen::Matrix2d jac;
    jac(0, 0) = s1;
    jac(0, 1) = s2;
    jac(1, 0) = 6.0 * s1 * s1 * s1;
    jac(1, 1) = 6.0 * s2 * s2 * s2;
    const Vec2 step = jac.fullPivLu().solve(f);
    double damp = 1.0;
    bool moved = false;
    for (; damp > 1e-6; damp *= 0.5) {
      const double t1 = std::clamp(s1 - damp * step[0], 0.05, 0.95);
      const double t2 = std::clamp(s2 - damp * step[1], 1.05, 4.0);
      if (fval(t1, t2).norm() < f.norm()) {
        s1 = t1;
        s2 = t2;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    f = fval(s1, s2);
  }
  throw NoSolution(fval(s1, s2).norm());
}

GridDensity coarsen(const GridDensity& mu, int max_nodes) {
  if (mu.dim != 1 || mu.axis[0].n <= max_nodes) return mu;
  GridDensity out;
  out.dim = 1;
  out.axis[0] = {mu.axis[0].lo, mu.axis[0].hi, max_nodes};
  out.p.resize(max_nodes);
  if (mu.p.minCoeff() > 0.0) {
    // resample in log space: cubic interpolation of tiny tail values would
    // otherwise overshoot below zero
    GridDensity logd = mu;
    logd.p = mu.p.array().log().matrix();
    for (int i = 0; i < max_nodes; ++i)
      out.p[i] = std::exp(logd.eval(out.axis[0].node(i)));
  } else {
    for (int i = 0; i < max_nodes; ++i)
      out.p[i] = std::max(0.0, mu.eval(out.axis[0].node(i)));
  }
  return out.normalize();
}

double l1_distance(const GridDensity& a, const GridDensity& b) {
  if (a.dim != 1 || b.dim != 1) throw std::invalid_argument("l1_distance: d=1 only");
  const double lo = std::min(a.axis[0].lo, b.axis[0].lo);
  const double hi = std::max(a.axis[0].hi, b.axis[0].hi);
  const int n = 2 * std::max(a.axis[0].n, b.axis[0].n);
  const double h = (hi - lo) / (n - 1);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + i * h;
    const double d = std::abs(a.eval(x) - b.eval(x));
    s += (i == 0 || i == n - 1) ? 0.5 * d : d;
  }
  return s * h;
}

}  // namespace steinlab
