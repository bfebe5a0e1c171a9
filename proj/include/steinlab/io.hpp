#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "steinlab/clt.hpp"
#include "steinlab/flow.hpp"
#include "steinlab/hermite_expansion.hpp"
#include "steinlab/kernels.hpp"
#include "steinlab/measures.hpp"
#include "steinlab/metrics.hpp"

namespace steinlab {

using Json = nlohmann::json;

/// Fixed-format number rendering so repeated runs are byte-identical.
std::string fmt_num(double v);

struct Distribution {
  std::string name;
  GridDensity density;
  Json spec;
  std::uint64_t seed = 12345;
};

/// Distribution spec: {"type": "uniform"|"gaussian"|"mixture"|
/// "smoothed_uniform"|"grid_file", parameters..., "seed": integer}.
Distribution distribution_from_json(const Json& spec, int grid_nodes = 0);
Distribution load_distribution(const std::filesystem::path& file, int grid_nodes = 0);

void write_text(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const Json& j);

void write_kernel_csv(const std::filesystem::path& path, const KernelField& tau,
                      const std::string& header_note);
void write_verdict_csv(const std::filesystem::path& path,
                       const std::vector<InequalityVerdict>& verdicts);
void write_rate_csv(const std::filesystem::path& path, const RateReport& report);
Json rate_report_json(const RateReport& report);
void write_density_csv(const std::filesystem::path& path, const GridDensity& mu);
GridDensity read_density_csv(const std::filesystem::path& path);
void write_expansion_csv(const std::filesystem::path& path, const HermiteExpansion& g);
void write_poisson_csv(const std::filesystem::path& path, const PoissonSolution& sol);

}  // namespace steinlab
