#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::path("cli_work");

void write_file(const fs::path& p, const std::string& s) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& out_dir, const fs::path& log) {
  const std::string cmd = std::string(STEINLAB_CLI_PATH) + " --out " + out_dir.string() + " " +
                          args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

struct Specs {
  fs::path uniform, gaussian, skewed, smoothed;
};

Specs make_specs() {
  Specs s;
  s.uniform = kWork / "uniform.json";
  s.gaussian = kWork / "gaussian.json";
  s.skewed = kWork / "skewed.json";
  s.smoothed = kWork / "smoothed.json";
  write_file(s.uniform, R"({"type": "uniform"})");
  write_file(s.gaussian, R"({"type": "gaussian", "sigma": 1.0})");
  write_file(s.skewed,
             R"({"type": "mixture", "weights": [0.3, 0.7], "means": [1.0, -0.42857142857142855],
                 "sigmas": [0.7559289460184544, 0.7559289460184544]})");
  write_file(s.smoothed, R"({"type": "smoothed_uniform", "sigma": 0.05})");
  return s;
}

}  // namespace

TEST_CASE("kernel command: closed-form summary and exit codes") {
  const Specs s = make_specs();

  CHECK(run_cli("kernel --dist " + s.uniform.string() + " --order 2", kWork / "k1",
                kWork / "k1.log") == 0);
  const auto summary =
      nlohmann::json::parse(slurp(kWork / "k1" / "uniform_kernel_summary.json"));
  CHECK(std::abs(summary.at("S2_squared").get<double>() - 2.0 / 35.0) < 1e-4);
  CHECK(fs::exists(kWork / "k1" / "uniform_kernel_k2.csv"));

  CHECK(run_cli("kernel --dist " + s.gaussian.string() + " --order 3", kWork / "k2",
                kWork / "k2.log") == 0);
  const auto g = nlohmann::json::parse(slurp(kWork / "k2" / "gaussian_kernel_summary.json"));
  CHECK(g.at("S3_squared").get<double>() < 1e-6);

  // skewed third moment: the command gates on moments to degree order+1
  CHECK(run_cli("kernel --dist " + s.skewed.string() + " --order 2", kWork / "k3",
                kWork / "k3.log") == 2);
  const std::string log = slurp(kWork / "k3.log");
  CHECK(log.find("moment") != std::string::npos);
  CHECK(log.find("3") != std::string::npos);  // the offending degree appears in the report

  CHECK(run_cli("kernel --dist " + (kWork / "absent.json").string() + " --order 1",
                kWork / "k4", kWork / "k4.log") == 1);
}

TEST_CASE("sweep command: slopes, sidecar, exit codes, determinism") {
  const Specs s = make_specs();

  CHECK(run_cli("sweep --dist " + s.uniform.string() + " --orders 1,2 --n 2:16:geometric",
                kWork / "s1", kWork / "s1.log") == 0);
  const auto sidecar = nlohmann::json::parse(slurp(kWork / "s1" / "uniform_rate.json"));
  CHECK(sidecar.at("all_pass").get<bool>());
  CHECK(std::abs(sidecar.at("slopes").at("S2").at("slope").get<double>() + 1.0) < 0.1);
  // symmetric base: the first-order discrepancy also decays like 1/n (the
  // leading projection E[tau_1 H_1] = m3/2 vanishes); pre-asymptotic at n<=16
  CHECK(std::abs(sidecar.at("slopes").at("S1").at("slope").get<double>() + 1.0) < 0.2);

  // gaussian base: all measured columns at zero, exit 0
  CHECK(run_cli("sweep --dist " + s.gaussian.string() + " --orders 2 --n 2:8:geometric",
                kWork / "s2", kWork / "s2.log") == 0);

  // single n: no slope (needs >= 3 points)
  CHECK(run_cli("sweep --dist " + s.uniform.string() + " --orders 2 --n 2", kWork / "s3",
                kWork / "s3.log") == 0);
  const auto s3 = nlohmann::json::parse(slurp(kWork / "s3" / "uniform_rate.json"));
  CHECK(s3.at("slopes").at("S2").is_null());

  // byte-identical rerun with the same config and seed
  CHECK(run_cli("sweep --dist " + s.uniform.string() + " --orders 2 --n 2:8:geometric --seed 7",
                kWork / "d1", kWork / "d1.log") == 0);
  CHECK(run_cli("sweep --dist " + s.uniform.string() + " --orders 2 --n 2:8:geometric --seed 7",
                kWork / "d2", kWork / "d2.log") == 0);
  CHECK(slurp(kWork / "d1" / "uniform_rate.csv") == slurp(kWork / "d2" / "uniform_rate.csv"));
  CHECK(slurp(kWork / "d1" / "uniform_rate.json") == slurp(kWork / "d2" / "uniform_rate.json"));
  CHECK(!slurp(kWork / "d1" / "uniform_rate.csv").empty());
}

TEST_CASE("verify command: suites and exit codes") {
  const Specs s = make_specs();

  CHECK(run_cli("verify --suite hsi --dist " + s.gaussian.string(), kWork / "v1",
                kWork / "v1.log") == 0);
  const std::string csv = slurp(kWork / "v1" / "verdicts_hsi.csv");
  CHECK(csv.find("inequality,lhs,rhs,slack,pass,params") == 0);
  CHECK(csv.find("hsi") != std::string::npos);

  CHECK(run_cli("verify --suite fisher-decay --dist " + s.uniform.string() +
                    " --times 0.1,0.5,1",
                kWork / "v2", kWork / "v2.log") == 0);
  const std::string fd = slurp(kWork / "v2" / "verdicts_fisher-decay.csv");
  CHECK(fd.find("fisher-decay") != std::string::npos);

  CHECK(run_cli("verify --suite debruijn --dist " + s.smoothed.string() + " --grid 2049",
                kWork / "v3", kWork / "v3.log") == 0);

  CHECK(run_cli("verify --suite transport --dist " + s.uniform.string(), kWork / "v5",
                kWork / "v5.log") == 0);
  CHECK(fs::exists(kWork / "v5" / "functional_uniform.json"));

  CHECK(run_cli("verify --suite nonsense --dist " + s.gaussian.string(), kWork / "v4",
                kWork / "v4.log") == 1);
}
