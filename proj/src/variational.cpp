#include "steinlab/variational.hpp"

#include <cmath>

namespace steinlab {

namespace {

Vec node_point(const GridDensity& mu, Index i, int n1) {
  Vec x(mu.dim);
  if (mu.dim == 1) {
    x[0] = mu.axis[0].node(static_cast<int>(i));
  } else {
    x[0] = mu.axis[0].node(static_cast<int>(i) / n1);
    x[1] = mu.axis[1].node(static_cast<int>(i) % n1);
  }
  return x;
}

Vec measure_weights(const GridDensity& mu) {
  if (mu.dim == 1) return mu.axis[0].trapezoid_weights().cwiseProduct(mu.p);
  const Vec w0 = mu.axis[0].trapezoid_weights();
  const Vec w1 = mu.axis[1].trapezoid_weights();
  Vec w(mu.size());
  const int n1 = mu.axis[1].n;
  for (Index i = 0; i < mu.size(); ++i)
    w[i] = w0[static_cast<int>(i) / n1] * w1[static_cast<int>(i) % n1] * mu.p[i];
  return w;
}

// partial^beta H_alpha(x) = prod_j alpha_j!/(alpha_j-beta_j)! * H_{alpha-beta}(x)
double dbeta_hermite(const MultiIndex& alpha, const MultiIndex& beta, const Vec& x) {
  double fall = 1.0;
  MultiIndex rem = alpha;
  for (int j = 0; j < alpha.dim(); ++j) {
    if (beta[j] > alpha[j]) return 0.0;
    for (int m = alpha[j]; m > alpha[j] - beta[j]; --m) fall *= m;
    rem.e[j] -= beta[j];
  }
  return fall * hermite_eval(rem, x);
}

// cubic interpolation of a d=1 kernel field
double eval_kernel_1d(const KernelField& tau, double x) {
  const GridAxis& ax = tau.axes[0];
  const double t = (x - ax.lo) / ax.h();
  int i = std::clamp(static_cast<int>(std::floor(t)), tau.valid_lo, tau.valid_hi - 1);
  const double u = t - i;
  auto val = [&](int j) { return tau.scalar_at(std::clamp(j, tau.valid_lo, tau.valid_hi)); };
  const double p0 = val(i - 1), p1 = val(i), p2 = val(i + 1), p3 = val(i + 2);
  return 0.5 * (2.0 * p1 + (-p0 + p2) * u + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u * u +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u * u * u);
}

struct AssemblyInput {
  int dim = 1;
  Mat pts;   // npts x dim
  Vec w;     // quadrature weight times density, or 1/n for samples
  Mat tau;   // canonical entries of the order-k kernel tensor, per point
};

NextKernelResult solve_core(const AssemblyInput& in, int k, int max_degree, double ridge_scale,
                            const std::array<GridAxis, 2>& out_axes, Index out_nodes) {
  const int d = in.dim;
  std::vector<MultiIndex> alphas;
  for (int deg = k + 1; deg <= max_degree; ++deg)
    for (const auto& a : multi_indices_of_degree(d, deg)) alphas.push_back(a);
  const int na = static_cast<int>(alphas.size());

  const auto& deriv_set = sym_index_set(k + 1, d);
  const auto& load_set = sym_index_set(k, d);

  Mat gram = Mat::Zero(na, na);
  Mat loads = Mat::Zero(na, d);
  const Index npts = in.pts.rows();
  const Index chunk = 4096;
  Mat phi;
  for (Index start = 0; start < npts; start += chunk) {
    const Index len = std::min(chunk, npts - start);
    for (int e = 0; e < deriv_set.size(); ++e) {
      const MultiIndex& beta = deriv_set.counts[e];
      const double mult = deriv_set.multiplicity[e];
      phi.resize(len, na);
      for (Index r = 0; r < len; ++r) {
        const Vec x = in.pts.row(start + r).transpose();
        const double sq = std::sqrt(std::max(0.0, in.w[start + r]) * mult);
        for (int a = 0; a < na; ++a) phi(r, a) = sq * dbeta_hermite(alphas[a], beta, x);
      }
      gram.selfadjointView<Eigen::Lower>().rankUpdate(phi.transpose());
    }
    for (Index r = 0; r < len; ++r) {
      const Index pt = start + r;
      const double wr = in.w[pt];
      if (wr <= 0.0) continue;
      const Vec x = in.pts.row(pt).transpose();
      SymTensor tau(k + 1, d);
      tau.values = in.tau.col(pt);
      for (int a = 0; a < na; ++a)
        for (int comp = 0; comp < d; ++comp) {
          double s = 0.0;
          for (int e = 0; e < load_set.size(); ++e) {
            const MultiIndex& beta = load_set.counts[e];
            const double df = dbeta_hermite(alphas[a], beta, x);
            if (df == 0.0) continue;
            s += load_set.multiplicity[e] * tau.at_counts(beta.plus_unit(comp)) * df;
          }
          loads(a, comp) += wr * s;
        }
    }
  }
  gram = gram.selfadjointView<Eigen::Lower>();

  const double ridge = ridge_scale * gram.trace() / na;
  const Mat reg = gram + ridge * Mat::Identity(na, na);
  Eigen::SelfAdjointEigenSolver<Mat> es(reg);
  const double cond = es.eigenvalues()(na - 1) / std::max(es.eigenvalues()(0), 1e-300);
  if (!(es.eigenvalues()(0) > 0.0)) throw IllConditioned(cond);

  Mat coef(na, d);
  for (int comp = 0; comp < d; ++comp)
    coef.col(comp) =
        es.eigenvectors() *
        (es.eigenvectors().transpose() * loads.col(comp)).cwiseQuotient(es.eigenvalues());
  const double resid = (reg * coef - loads).norm() / std::max(loads.norm(), 1e-300);

  HermiteExpansion g = HermiteExpansion::zero(d, d, max_degree);
  for (int a = 0; a < na; ++a)
    for (int comp = 0; comp < d; ++comp) g.set_coef(alphas[a], comp, coef(a, comp));

  NextKernelResult out;
  out.g = g;
  out.coef = Eigen::Map<Vec>(coef.data(), coef.size());
  out.solver_residual = resid;
  GalerkinSystem sys;
  sys.gram = gram;
  sys.load = Eigen::Map<Vec>(loads.data(), loads.size());
  sys.ridge = ridge;
  sys.condition = cond;
  for (int comp = 0; comp < d; ++comp)
    for (int a = 0; a < na; ++a) sys.basis.emplace_back(alphas[a], comp);
  out.system = std::move(sys);

  KernelField kf;
  kf.order = k + 1;
  kf.dim = d;
  kf.provenance = KernelField::Provenance::variational;
  kf.axes = out_axes;
  kf.potential = g;
  kf.values.resize(sym_index_set(k + 2, d).size(), out_nodes);
  const int n1 = d == 2 ? out_axes[1].n : 1;
  double asym = 0.0;
  for (Index i = 0; i < out_nodes; ++i) {
    Vec x(d);
    if (d == 1) {
      x[0] = out_axes[0].node(static_cast<int>(i));
    } else {
      x[0] = out_axes[0].node(static_cast<int>(i) / n1);
      x[1] = out_axes[1].node(static_cast<int>(i) % n1);
    }
    double a = 0.0;
    const SymTensor t = derivative_tensor_symmetrized(g, k + 1, x, &a);
    kf.values.col(i) = t.values;
    asym = std::max(asym, a);
  }
  kf.valid_lo = 0;
  kf.valid_hi = static_cast<int>(out_nodes) - 1;
  out.asymmetry = asym;
  out.kernel = std::move(kf);
  return out;
}

}  // namespace

NextKernelResult solve_next_kernel(const GridDensity& mu, const KernelField& tau_k,
                                   int max_degree, double ridge_scale) {
  const int k = tau_k.order;
  if (tau_k.dim != mu.dim) throw std::invalid_argument("solve_next_kernel: dim mismatch");
  if (max_degree < k + 2)
    throw std::invalid_argument("solve_next_kernel: max_degree must be >= k+2");
  require_moments_match(mu, k, 1e-6);

  AssemblyInput in;
  in.dim = mu.dim;
  const int n1 = mu.dim == 2 ? mu.axis[1].n : 1;
  in.pts.resize(mu.size(), mu.dim);
  for (Index i = 0; i < mu.size(); ++i) in.pts.row(i) = node_point(mu, i, n1).transpose();
  in.w = measure_weights(mu);
  in.tau = Mat::Zero(tau_k.values.rows(), mu.size());
  for (Index i = 0; i < mu.size(); ++i) {
    if (tau_k.valid_at(i)) {
      in.tau.col(i) = tau_k.values.col(i);
    } else {
      in.w[i] = 0.0;
    }
  }
  return solve_core(in, k, max_degree, ridge_scale, mu.axis, mu.size());
}

NextKernelResult solve_next_kernel(const SampleMeasure& mu, const KernelField& tau_k,
                                   int max_degree, const GridAxis& eval_grid,
                                   double ridge_scale) {
  const int k = tau_k.order;
  if (tau_k.dim != mu.dim) throw std::invalid_argument("solve_next_kernel: dim mismatch");
  const Index n = mu.points.rows();
  AssemblyInput in;
  in.dim = mu.dim;
  in.pts = mu.points;
  in.w = Vec::Constant(n, 1.0 / static_cast<double>(n));
  const auto& tset = sym_index_set(k + 1, mu.dim);
  in.tau.resize(tset.size(), n);
  for (Index i = 0; i < n; ++i) {
    const Vec x = mu.points.row(i).transpose();
    if (tau_k.potential) {
      in.tau.col(i) = derivative_tensor_symmetrized(*tau_k.potential, k, x).values;
    } else if (mu.dim == 1) {
      in.tau(0, i) = eval_kernel_1d(tau_k, x[0]);
    } else {
      throw std::invalid_argument(
          "solve_next_kernel(samples): tau_k needs a Hermite potential in d=2");
    }
  }
  std::array<GridAxis, 2> axes{eval_grid, eval_grid};
  const Index out_nodes =
      mu.dim == 1 ? eval_grid.n : static_cast<Index>(eval_grid.n) * eval_grid.n;
  return solve_core(in, k, max_degree, ridge_scale, axes, out_nodes);
}

double functional_value(const HermiteExpansion& g, const GridDensity& mu,
                        const KernelField& tau_k) {
  const int k = tau_k.order;
  const int n1 = mu.dim == 2 ? mu.axis[1].n : 1;
  Vec nodes_val(mu.size());
  for (Index i = 0; i < mu.size(); ++i) {
    const Vec x = node_point(mu, i, n1);
    double v = 0.5 * derivative_norm2(g, k + 1, x);
    if (tau_k.valid_at(i)) v -= inner_with_derivative(tau_k.tensor_at(i), g, k, x);
    nodes_val[i] = v;
  }
  return mu.integrate(nodes_val);
}

ExistenceBound existence_bound_check(const GridDensity& mu, int k) {
  ExistenceBound out;
  const PoincareEstimate pe = poincare_constant(mu);
  out.c_p = pe.constant;
  out.bound = std::pow(pe.constant, k - 1) * (pe.constant - 1.0) * mu.dim;
  const KernelField tau = kernel_1d_iterative(mu, k);
  out.discrepancy_sq = discrepancy_squared(tau, mu);
  if (pe.constant < 1.0) {
    out.skipped = true;
    out.pass = true;  // vacuous below C_P = 1, recorded as skipped
    return out;
  }
  out.pass = out.discrepancy_sq <= out.bound + 1e-9;
  return out;
}

}  // namespace steinlab
