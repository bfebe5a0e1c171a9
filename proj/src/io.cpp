#include "steinlab/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace steinlab {

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

Distribution distribution_from_json(const Json& spec, int grid_nodes) {
  Distribution d;
  d.spec = spec;
  d.seed = spec.value("seed", 12345ULL);
  const std::string type = spec.at("type").get<std::string>();
  const int n = grid_nodes > 0 ? grid_nodes : spec.value("grid", 4096);
  d.name = type;
  if (type == "uniform") {
    d.density = uniform_1d(spec.value("half_width", std::sqrt(3.0)), n);
  } else if (type == "gaussian") {
    const double sigma = spec.value("sigma", 1.0);
    const double half = std::max(8.0, 8.0 * sigma);
    d.density = gaussian_1d(sigma, GridAxis{-half, half, n});
  } else if (type == "smoothed_uniform") {
    d.density = smoothed_uniform_1d(spec.value("sigma", 0.05), n);
  } else if (type == "mixture") {
    if (spec.contains("weights")) {
      // explicit Gaussian location-scale mixture
      Vec w(spec.at("weights").size()), m(w.size()), s(w.size());
      for (Index i = 0; i < w.size(); ++i) {
        w[i] = spec.at("weights")[i].get<double>();
        m[i] = spec.at("means")[i].get<double>();
        s[i] = spec.at("sigmas")[i].get<double>();
      }
      double reach = 8.0;
      for (Index i = 0; i < w.size(); ++i)
        reach = std::max(reach, std::abs(m[i]) + 8.0 * s[i]);
      d.density = gaussian_mixture_1d(w, m, s, GridAxis{-reach, reach, n});
      d.name = "gaussian_mixture";
    } else {
      FamilySpec fam;
      fam.kind = FamilySpec::Kind::uniform_gauss_mixture;
      fam.smoothing = spec.value("smoothing", 0.0);
      fam.n_nodes = n;
      d.density = match_moments(fam, spec.value("match_degree", 4)).density;
      d.name = "matched_mixture";
    }
  } else if (type == "scale_mixture") {
    FamilySpec fam;
    fam.kind = FamilySpec::Kind::gaussian_scale_mixture;
    fam.n_nodes = n;
    d.density = match_moments(fam, spec.value("match_degree", 4)).density;
    d.name = "scale_mixture";
  } else if (type == "grid_file") {
    d.density = read_density_csv(spec.at("path").get<std::string>());
    d.name = "grid_file";
  } else {
    throw std::invalid_argument("unknown distribution type: " + type);
  }
  return d;
}

Distribution load_distribution(const std::filesystem::path& file, int grid_nodes) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open distribution spec " + file.string());
  Json j;
  in >> j;
  return distribution_from_json(j, grid_nodes);
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

void write_kernel_csv(const std::filesystem::path& path, const KernelField& tau,
                      const std::string& header_note) {
  std::ostringstream out;
  out << "# " << header_note << "\n";
  if (tau.dim == 1) {
    out << "x,tau\n";
    for (int i = tau.valid_lo; i <= tau.valid_hi; ++i)
      out << fmt_num(tau.axes[0].node(i)) << "," << fmt_num(tau.scalar_at(i)) << "\n";
  } else {
    const auto& set = sym_index_set(tau.tensor_order(), tau.dim);
    out << "x0,x1";
    for (int e = 0; e < set.size(); ++e) out << ",tau_" << set.counts[e].str();
    out << "\n";
    const int n1 = tau.axes[1].n;
    for (Index node = 0; node < tau.num_nodes(); ++node) {
      out << fmt_num(tau.axes[0].node(static_cast<int>(node) / n1)) << ","
          << fmt_num(tau.axes[1].node(static_cast<int>(node) % n1));
      for (Index e = 0; e < tau.values.rows(); ++e) out << "," << fmt_num(tau.values(e, node));
      out << "\n";
    }
  }
  write_text(path, out.str());
}

void write_verdict_csv(const std::filesystem::path& path,
                       const std::vector<InequalityVerdict>& verdicts) {
  std::ostringstream out;
  out << "inequality,lhs,rhs,slack,pass,params\n";
  for (const auto& v : verdicts)
    out << v.name << "," << fmt_num(v.lhs) << "," << fmt_num(v.rhs) << "," << fmt_num(v.slack)
        << "," << (v.pass ? "1" : "0") << "," << v.params << "\n";
  write_text(path, out.str());
}

namespace {
std::string opt_num(const std::optional<double>& v) { return v ? fmt_num(*v) : ""; }
std::string opt_flag(const std::optional<bool>& v) { return v ? (*v ? "1" : "0") : ""; }
}  // namespace

void write_rate_csv(const std::filesystem::path& path, const RateReport& report) {
  std::ostringstream out;
  out << "n,Sk1,Sk2,W2,H,dZol2,bound_w2,bound_S,bound_H,bound_zol,"
         "pass_S,pass_w2,pass_H,pass_zol,pass_zol_vs_S\n";
  for (const auto& r : report.rows) {
    out << r.n << "," << opt_num(r.s1) << "," << opt_num(r.s2) << "," << opt_num(r.w2) << ","
        << opt_num(r.entropy_val) << "," << opt_num(r.dzol2) << "," << opt_num(r.bound_w2) << ","
        << opt_num(r.bound_s) << "," << opt_num(r.bound_h) << "," << opt_num(r.bound_zol) << ","
        << opt_flag(r.pass_s) << "," << opt_flag(r.pass_w2) << "," << opt_flag(r.pass_h) << ","
        << opt_flag(r.pass_zol) << "," << opt_flag(r.pass_zol_vs_s) << "\n";
  }
  write_text(path, out.str());
}

Json rate_report_json(const RateReport& report) {
  Json j;
  j["notes"] = report.notes;
  j["all_pass"] = report.all_pass();
  Json slopes = Json::object();
  for (const auto& [name, fit] : report.slopes) {
    if (!fit.defined) {
      slopes[name] = nullptr;
      continue;
    }
    slopes[name] = {{"slope", fit.slope}, {"std_error", fit.std_error}, {"points", fit.points}};
  }
  j["slopes"] = slopes;
  return j;
}

void write_density_csv(const std::filesystem::path& path, const GridDensity& mu) {
  if (mu.dim != 1) throw std::invalid_argument("write_density_csv: d=1 only");
  std::ostringstream out;
  out << "x,p\n";
  for (Index i = 0; i < mu.size(); ++i)
    out << fmt_num(mu.axis[0].node(static_cast<int>(i))) << "," << fmt_num(mu.p[i]) << "\n";
  write_text(path, out.str());
}

GridDensity read_density_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open density csv " + path.string());
  std::string line;
  std::vector<double> xs, ps;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'x') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    xs.push_back(std::stod(line.substr(0, comma)));
    ps.push_back(std::stod(line.substr(comma + 1)));
  }
  if (xs.size() < 8) throw std::runtime_error("density csv too short");
  GridDensity mu;
  mu.dim = 1;
  mu.axis[0] = {xs.front(), xs.back(), static_cast<int>(xs.size())};
  mu.p.resize(static_cast<Index>(ps.size()));
  for (size_t i = 0; i < ps.size(); ++i) mu.p[static_cast<Index>(i)] = ps[i];
  const double h = mu.axis[0].h();
  for (size_t i = 1; i < xs.size(); ++i)
    if (std::abs(xs[i] - xs[0] - h * static_cast<double>(i)) > 1e-9 * std::max(1.0, std::abs(xs[i])))
      throw std::runtime_error("density csv: grid not uniform");
  return mu.normalize();
}

void write_expansion_csv(const std::filesystem::path& path, const HermiteExpansion& g) {
  std::ostringstream out;
  out << "alpha,component,coef\n";
  for (int i = 0; i < g.basis_size(); ++i)
    for (int c = 0; c < g.components; ++c) {
      if (g.coef(i, c) == 0.0) continue;
      out << g.alphas[i].str() << "," << c << "," << fmt_num(g.coef(i, c)) << "\n";
    }
  write_text(path, out.str());
}

void write_poisson_csv(const std::filesystem::path& path, const PoissonSolution& sol) {
  std::ostringstream out;
  out << "x,h";
  for (size_t j = 0; j < sol.deriv.size(); ++j) out << ",h" << j + 1;
  out << "\n";
  for (int i = 0; i < sol.grid.n; ++i) {
    out << fmt_num(sol.grid.node(i)) << "," << fmt_num(sol.h[i]);
    for (const auto& d : sol.deriv) out << "," << fmt_num(d[i]);
    out << "\n";
  }
  write_text(path, out.str());
}

}  // namespace steinlab
