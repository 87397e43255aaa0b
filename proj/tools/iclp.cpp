// Copyright 2026 The ICLP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Exit codes: 0 success, 2 configuration error,
// 3 data error, 4 privacy infeasible.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "iclp/experiment.hpp"
#include "iclp/iclp.hpp"
#include "json.hpp"

namespace {

using iclp::ConfigError;
using iclp::DataError;
using iclp::PrivacyError;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

enum ExitCode { kOk = 0, kConfig = 2, kData = 3, kPrivacy = 4 };

// ---------------------------------------------------------------------------
// Shared option groups.

struct KernelOptions {
  std::string name;
  double rho = 0.1;
  std::string normalize;
  double floor_rel = iclp::kDefaultFloorRel;

  void Add(CLI::App* app, const std::string& default_name,
           const std::string& default_normalize) {
    name = default_name;
    normalize = default_normalize;
    app->add_option("--kernel", name,
                    "matern32, matern52, exponential, gaussian or matern:<alpha>")
        ->capture_default_str();
    app->add_option("--rho", rho, "kernel length scale")->capture_default_str();
    app->add_option("--normalize", normalize,
                    "'trace' rescales the kernel to unit trace on the grid")
        ->check(CLI::IsMember({"trace", "none"}))
        ->capture_default_str();
    app->add_option("--floor-rel", floor_rel,
                    "drop eigenvalues below this fraction of the largest")
        ->capture_default_str();
  }

  iclp::KernelSpec Base() const { return iclp::KernelSpec::Parse(name, rho); }

  void Validate() const {
    Base();
    ICLP_REQUIRE(floor_rel > 0 && floor_rel < 1, ConfigError,
                 "--floor-rel must lie in (0, 1)");
  }

  iclp::KernelSpec Spec(const iclp::GridSpec& grid) const {
    const iclp::KernelSpec k = Base();
    return normalize == "trace" ? iclp::normalize_trace(k, grid) : k;
  }

  iclp::SpectralBasis Basis(const iclp::GridSpec& grid) const {
    return iclp::decompose(Spec(grid), grid, floor_rel);
  }
};

struct DomainOptions {
  int dim = 1;
  int k = 200;
  double lo = 0.0, hi = 1.0, ylo = 0.0, yhi = 1.0;

  void Add(CLI::App* app, int default_k) {
    k = default_k;
    app->add_option("--dim", dim, "domain dimension")
        ->check(CLI::IsMember({1, 2}))
        ->capture_default_str();
    app->add_option("--K", k, "grid points per axis")->capture_default_str();
    app->add_option("--lo", lo, "lower bound of axis 1")->capture_default_str();
    app->add_option("--hi", hi, "upper bound of axis 1")->capture_default_str();
    app->add_option("--ylo", ylo, "lower bound of axis 2")->capture_default_str();
    app->add_option("--yhi", yhi, "upper bound of axis 2")->capture_default_str();
  }

  iclp::GridSpec Grid() const {
    return dim == 1 ? iclp::GridSpec::Line(k, lo, hi)
                    : iclp::GridSpec::Square(k, {lo, hi}, {ylo, yhi});
  }
};

void RequireReadable(const std::string& path, const std::string& flag) {
  ICLP_REQUIRE(std::filesystem::is_regular_file(path), DataError, flag,
               ": cannot open '", path, "'");
}

void RequirePositive(double v, const std::string& flag) {
  ICLP_REQUIRE(v > 0 && std::isfinite(v), ConfigError, flag,
               " must be positive, got ", v);
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  ICLP_REQUIRE(out.good(), DataError, "cannot write '", path, "'");
  out << text;
}

std::string MetaPath(const std::string& out, const std::string& meta) {
  return meta.empty() ? out + ".json" : meta;
}

// ---------------------------------------------------------------------------
// Release ledger: one JSON line per release next to the input file.

struct Ledger {
  std::string path;
  int prior = 0;
  double prior_epsilon = 0.0;
  double prior_delta = 0.0;
};

Ledger CheckLedger(const std::string& input, bool composes) {
  Ledger l;
  l.path = input + ".releases.jsonl";
  std::ifstream in(l.path);
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    try {
      const json e = json::parse(line);
      ++l.prior;
      l.prior_epsilon += e.value("epsilon", 0.0);
      l.prior_delta += e.value("delta", 0.0);
    } catch (const json::exception&) {
      throw DataError("release ledger '" + l.path + "' is corrupt");
    }
  }
  ICLP_REQUIRE(l.prior == 0 || composes, PrivacyError, "'", input, "' already has ",
               l.prior, " recorded release(s) (epsilon ", l.prior_epsilon,
               ") in ", l.path,
               "; another release composes with them. Pass "
               "--i-know-this-composes to proceed.");
  return l;
}

void AppendLedger(const Ledger& l, const std::string& command,
                  const std::string& out, const iclp::PrivacyBudget& b,
                  std::uint64_t seed) {
  std::ofstream f(l.path, std::ios::app);
  ICLP_REQUIRE(f.good(), DataError, "cannot append to '", l.path, "'");
  f << json{{"command", command},
            {"output", out},
            {"epsilon", b.epsilon},
            {"delta", b.delta},
            {"seed", seed}}
           .dump()
    << '\n';
}

json ComposedBudget(const Ledger& l, const iclp::PrivacyBudget& b) {
  return {{"prior_releases", l.prior},
          {"epsilon_total", l.prior_epsilon + b.epsilon},
          {"delta_total", l.prior_delta + b.delta}};
}

// ---------------------------------------------------------------------------
// Metadata.

json GridJson(const iclp::GridSpec& g) {
  json j = {{"dim", g.dim()}, {"points_per_axis", g.points_per_axis()}};
  j["x"] = {g.bounds(0).lo, g.bounds(0).hi};
  if (g.dim() == 2) j["y"] = {g.bounds(1).lo, g.bounds(1).hi};
  return j;
}

json KernelJson(const iclp::KernelSpec& k, const KernelOptions& o) {
  return {{"name", k.Name()},
          {"alpha", k.alpha},
          {"rho", k.rho},
          {"amplitude", k.amplitude},
          {"normalize", o.normalize}};
}

json ReleaseJson(const iclp::SanitizedRelease& r) {
  json j = {{"mechanism", r.mechanism},
            {"process", iclp::ToString(r.process)},
            {"delta_gs", r.delta_gs},
            {"sigma", r.sigma},
            {"epsilon", r.budget.epsilon},
            {"delta", r.budget.delta},
            {"seed", r.seed},
            {"n", r.n},
            {"floor_rel", r.floor_rel},
            {"noisy_components", r.noisy_components}};
  if (r.mechanism != "kde") {
    j["config"] = {{"strategy", iclp::ToString(r.config.strategy)},
                   {"M", r.config.M},
                   {"psi", r.config.psi},
                   {"eta", r.config.eta},
                   {"tau", r.config.tau}};
  }
  for (const auto& [k, v] : r.parameters) j["parameters"][k] = v;
  j["warnings"] = r.warnings;
  return j;
}

void Warn(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "iclp: warning: " << w << '\n';
}

// ---------------------------------------------------------------------------
// Commands. Each Run() validates every flag before touching input data.

struct KernelEig {
  KernelOptions kernel;
  DomainOptions domain;
  std::string out;

  void Add(CLI::App* app) {
    kernel.Add(app, "matern32", "trace");
    domain.Add(app, 200);
    app->add_option("--out", out, "basis CSV: one row per eigenpair, lambda first");
  }

  int Run() {
    kernel.Validate();
    const iclp::GridSpec grid = domain.Grid();
    const iclp::KernelSpec spec = kernel.Spec(grid);
    const iclp::SpectralBasis b = iclp::decompose(spec, grid, kernel.floor_rel);
    if (!out.empty()) iclp::save_basis_csv(b, out);
    json j = {{"kernel", KernelJson(spec, kernel)},
              {"grid", GridJson(grid)},
              {"j_max", b.size()},
              {"discarded", b.discarded},
              {"lambda_1", b.eigenvalues(0)},
              {"trace", b.eigenvalues.sum()}};
    if (b.size() >= 7) j["beta_hat"] = iclp::fit_decay(b, 5, std::min(50, b.size()));
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
};

struct NoiseSample {
  KernelOptions kernel;
  DomainOptions domain;
  std::string process = "iclp";
  double sigma = 1.0;
  std::uint64_t seed = 0;
  int draws = 1;
  std::string out;

  void Add(CLI::App* app) {
    kernel.Add(app, "matern32", "trace");
    domain.Add(app, 200);
    app->add_option("--process", process, "iclp or gp")
        ->check(CLI::IsMember({"iclp", "gp"}))
        ->capture_default_str();
    app->add_option("--sigma", sigma, "noise scale")->required();
    app->add_option("--seed", seed, "master seed; draw d uses a stream derived from (seed, d)")
        ->required();
    app->add_option("--draws", draws, "number of paths")->capture_default_str();
    app->add_option("--out", out, "output CSV")->required();
  }

  int Run() {
    kernel.Validate();
    ICLP_REQUIRE(sigma >= 0 && std::isfinite(sigma), ConfigError,
                 "--sigma must be nonnegative");
    ICLP_REQUIRE(draws >= 1, ConfigError, "--draws must be at least 1");
    const iclp::SpectralBasis b = kernel.Basis(domain.Grid());
    const iclp::NoiseProcess p =
        process == "iclp" ? iclp::NoiseProcess::kIclp : iclp::NoiseProcess::kGp;
    std::vector<iclp::FunctionOnGrid> paths;
    for (int d = 0; d < draws; ++d) {
      paths.push_back(iclp::SampleProcess(
                          b, sigma, p, iclp::DeriveSeed(seed, {std::uint64_t(d)}))
                          .path);
    }
    iclp::save_csv(paths, out);
    return kOk;
  }
};

struct MeanSanitize {
  KernelOptions kernel;
  std::string strategy = "iclp-qr";
  double eps = 0.0, delta = 0.0, tau = 0.0;
  std::optional<int> m;
  std::optional<double> psi, eta;
  std::uint64_t seed = 0;
  std::string in, out, meta;
  bool composes = false;

  void Add(CLI::App* app) {
    kernel.Add(app, "matern32", "trace");
    app->add_option("--strategy", strategy, "frl, iclp-ar, iclp-qr or gp-adp")
        ->check(CLI::IsMember({"frl", "iclp-ar", "iclp-qr", "gp-adp"}))
        ->capture_default_str();
    app->add_option("--eps", eps, "privacy budget epsilon")->required();
    app->add_option("--delta", delta, "privacy budget delta (gp-adp only)");
    app->add_option("--tau", tau, "L2 norm bound; longer curves are clipped")->required();
    app->add_option("--M", m, "FRL truncation level");
    app->add_option("--psi", psi,
                    "penalty; iclp-qr and gp-adp default to the data-independent choice");
    app->add_option("--eta", eta, "penalty power");
    app->add_option("--seed", seed, "noise seed")->required();
    app->add_option("--in", in, "input curves CSV")->required();
    app->add_option("--out", out, "release CSV")->required();
    app->add_option("--meta", meta, "metadata JSON (default: <out>.json)");
    app->add_flag("--i-know-this-composes", composes,
                  "allow another release from an input that already has one");
  }

  int Run() {
    kernel.Validate();
    const iclp::Strategy s = iclp::ParseStrategy(strategy);
    const iclp::PrivacyBudget budget{eps, delta};
    budget.Validate();
    if (s == iclp::Strategy::kGpAdp) {
      ICLP_REQUIRE(delta > 0, ConfigError, "gp-adp needs --delta in (0, 1)");
    } else {
      ICLP_REQUIRE(delta == 0, ConfigError, strategy,
                   " is pure DP; --delta must be 0");
    }
    RequirePositive(tau, "--tau");
    if (s == iclp::Strategy::kFrl) {
      ICLP_REQUIRE(m.has_value(), ConfigError, "frl needs --M");
      ICLP_REQUIRE(*m >= 1, ConfigError, "--M must be at least 1");
    }
    if (s == iclp::Strategy::kIclpAr) {
      ICLP_REQUIRE(psi && eta, ConfigError, "iclp-ar needs --psi and --eta");
    }
    if (psi) RequirePositive(*psi, "--psi");
    if (eta) {
      const bool ok = s == iclp::Strategy::kIclpAr ? *eta >= 1 : *eta > 1;
      ICLP_REQUIRE(ok && std::isfinite(*eta), ConfigError, "--eta = ", *eta,
                   " is out of range for ", strategy);
    }
    RequireReadable(in, "--in");
    const Ledger ledger = CheckLedger(in, composes);

    const auto curves = iclp::load_csv(in);
    const int n = static_cast<int>(curves.size());
    ICLP_REQUIRE(n >= 2, DataError, "need at least 2 curves, got ", n);
    const iclp::GridSpec& grid = curves.front().grid();
    const iclp::KernelSpec spec = kernel.Spec(grid);
    const iclp::SpectralBasis b = iclp::decompose(spec, grid, kernel.floor_rel);

    iclp::MechanismConfig cfg;
    json pss;
    switch (s) {
      case iclp::Strategy::kFrl:
        cfg = iclp::MechanismConfig::Frl(*m, tau);
        break;
      case iclp::Strategy::kIclpAr:
        cfg = iclp::MechanismConfig::IclpAr(*psi, *eta, tau);
        break;
      default: {
        double p = psi.value_or(0.0), e = eta.value_or(0.0);
        if (!psi || !eta) {
          const double beta = iclp::fit_decay(b, 5, std::min(50, b.size()));
          const iclp::PssChoice c = iclp::pss_qr(n, eps, beta);
          if (!psi) p = c.psi;
          if (!eta) e = c.eta;
          pss = {{"psi", c.psi}, {"eta", c.eta}, {"psi_min", c.psi_min},
                 {"beta_hat", beta}, {"note", c.note}};
        }
        cfg = s == iclp::Strategy::kGpAdp ? iclp::MechanismConfig::GpAdp(p, e, tau)
                                          : iclp::MechanismConfig::IclpQr(p, e, tau);
      }
    }
    const iclp::SanitizedRelease r = iclp::sanitize_mean(curves, b, cfg, budget, seed);
    iclp::save_csv(r.summary, out);
    json j = ReleaseJson(r);
    j["kernel"] = KernelJson(spec, kernel);
    j["grid"] = GridJson(grid);
    j["input"] = in;
    j["output"] = out;
    j["composition"] = ComposedBudget(ledger, budget);
    j["version"] = kVersion;
    if (!pss.is_null()) j["pss"] = pss;
    WriteText(MetaPath(out, meta), j.dump(2) + "\n");
    AppendLedger(ledger, "mean sanitize", out, budget, seed);
    Warn(r.warnings);
    return kOk;
  }
};

struct KdeSanitize {
  KernelOptions kernel;
  DomainOptions domain;
  double eps = 0.0, eta = 2.0;
  std::optional<double> h;
  std::uint64_t seed = 0;
  std::string in, out, meta;
  bool composes = false, certified = false;
  int probe_stride = 1;

  void Add(CLI::App* app) {
    app->set_help_flag("--help", "Print this help message and exit");  // frees -h
    kernel.Add(app, "gaussian", "none");
    domain.Add(app, 200);
    app->add_option("--eps", eps, "privacy budget epsilon")->required();
    app->add_option("--eta", eta, "kernel power (> 1)")->capture_default_str();
    app->add_option("--h", h, "bandwidth (default n^(-1/(4+d)))");
    app->add_option("--seed", seed, "noise seed")->required();
    app->add_option("--in", in, "points CSV, one observation per row")->required();
    app->add_option("--out", out, "release CSV")->required();
    app->add_option("--meta", meta, "metadata JSON (default: <out>.json)");
    app->add_flag("--certified-bound", certified,
                  "also measure the sensitivity on the grid and use the larger value");
    app->add_option("--probe-stride", probe_stride, "probe every k-th node per axis")
        ->capture_default_str();
    app->add_flag("--i-know-this-composes", composes,
                  "allow another release from an input that already has one");
  }

  int Run() {
    kernel.Validate();
    const iclp::PrivacyBudget budget{eps, 0.0};
    budget.Validate();
    ICLP_REQUIRE(eta > 1 && std::isfinite(eta), ConfigError, "--eta must exceed 1");
    if (h) RequirePositive(*h, "--h");
    ICLP_REQUIRE(probe_stride >= 1, ConfigError, "--probe-stride must be >= 1");
    const iclp::GridSpec grid = domain.Grid();
    RequireReadable(in, "--in");
    const Ledger ledger = CheckLedger(in, composes);

    const Eigen::MatrixXd pts = iclp::ReadMatrix(in);
    const int n = static_cast<int>(pts.rows());
    const double bw = h.value_or(std::pow(n, -1.0 / (4.0 + grid.dim())));
    const iclp::KernelSpec spec = kernel.Spec(grid);
    const iclp::SpectralBasis b = iclp::decompose(spec, grid, kernel.floor_rel);
    iclp::KdeOptions opt;
    opt.certified_bound = certified;
    opt.probe_stride = probe_stride;
    const iclp::SanitizedRelease r = iclp::dp_kde(pts, b, spec, eta, bw, budget, seed, opt);
    iclp::save_csv(r.summary, out);
    json j = ReleaseJson(r);
    j["kernel"] = KernelJson(spec, kernel);
    j["grid"] = GridJson(grid);
    j["input"] = in;
    j["output"] = out;
    j["composition"] = ComposedBudget(ledger, budget);
    j["version"] = kVersion;
    WriteText(MetaPath(out, meta), j.dump(2) + "\n");
    AppendLedger(ledger, "kde sanitize", out, budget, seed);
    Warn(r.warnings);
    return kOk;
  }
};

struct CovSanitize {
  KernelOptions kernel;
  double eps = 0.0, tau = 0.0, psi = 0.0, eta = 0.0;
  std::uint64_t seed = 0;
  std::string in, out, meta;
  bool composes = false;

  void Add(CLI::App* app) {
    kernel.Add(app, "matern32", "trace");
    app->add_option("--eps", eps, "privacy budget epsilon")->required();
    app->add_option("--tau", tau, "L2 norm bound")->required();
    app->add_option("--psi", psi, "penalty")->required();
    app->add_option("--eta", eta, "penalty power (> 1)")->required();
    app->add_option("--seed", seed, "noise seed")->required();
    app->add_option("--in", in, "input curves CSV")->required();
    app->add_option("--out", out, "surface CSV")->required();
    app->add_option("--meta", meta, "metadata JSON (default: <out>.json)");
    app->add_flag("--i-know-this-composes", composes,
                  "allow another release from an input that already has one");
  }

  int Run() {
    kernel.Validate();
    const iclp::PrivacyBudget budget{eps, 0.0};
    budget.Validate();
    RequirePositive(tau, "--tau");
    RequirePositive(psi, "--psi");
    ICLP_REQUIRE(eta > 1 && std::isfinite(eta), ConfigError, "--eta must exceed 1");
    RequireReadable(in, "--in");
    const Ledger ledger = CheckLedger(in, composes);

    const auto curves = iclp::load_csv(in);
    const iclp::GridSpec& grid = curves.front().grid();
    const iclp::KernelSpec spec = kernel.Spec(grid);
    const iclp::SpectralBasis b = iclp::decompose(spec, grid, kernel.floor_rel);
    const iclp::SanitizedRelease r =
        iclp::dp_covariance(curves, b, psi, eta, tau, budget, seed);
    iclp::save_csv(r.summary, out);
    json j = ReleaseJson(r);
    j["kernel"] = KernelJson(spec, kernel);
    j["grid"] = GridJson(r.summary.grid());
    j["input"] = in;
    j["output"] = out;
    j["composition"] = ComposedBudget(ledger, budget);
    j["version"] = kVersion;
    WriteText(MetaPath(out, meta), j.dump(2) + "\n");
    AppendLedger(ledger, "cov sanitize", out, budget, seed);
    return kOk;
  }
};

struct FosSanitize {
  KernelOptions kernel;
  double eps = 0.0, tau = 0.0, psi = 0.0, eta = 0.0, gamma = 0.5, bx = 0.0;
  std::uint64_t seed = 0;
  std::string in, x, out, meta;
  bool composes = false;

  void Add(CLI::App* app) {
    kernel.Add(app, "matern32", "trace");
    app->add_option("--eps", eps, "privacy budget epsilon")->required();
    app->add_option("--gamma", gamma, "share of epsilon spent on X'X/n")
        ->capture_default_str();
    app->add_option("--tau", tau, "L2 norm bound on response curves")->required();
    app->add_option("--bx", bx, "bound on |covariate| entries")->required();
    app->add_option("--psi", psi, "penalty")->required();
    app->add_option("--eta", eta, "penalty power (> 1)")->required();
    app->add_option("--seed", seed, "noise seed")->required();
    app->add_option("--in", in, "response curves CSV")->required();
    app->add_option("--x", x, "covariates CSV, n rows by p columns")->required();
    app->add_option("--out", out, "coefficient curves CSV, one row per covariate")
        ->required();
    app->add_option("--meta", meta, "metadata JSON (default: <out>.json)");
    app->add_flag("--i-know-this-composes", composes,
                  "allow another release from an input that already has one");
  }

  int Run() {
    kernel.Validate();
    const iclp::PrivacyBudget budget{eps, 0.0};
    budget.Validate();
    ICLP_REQUIRE(gamma > 0 && gamma < 1, ConfigError, "--gamma must lie in (0, 1)");
    RequirePositive(tau, "--tau");
    RequirePositive(bx, "--bx");
    RequirePositive(psi, "--psi");
    ICLP_REQUIRE(eta > 1 && std::isfinite(eta), ConfigError, "--eta must exceed 1");
    RequireReadable(in, "--in");
    RequireReadable(x, "--x");
    const Ledger ledger = CheckLedger(in, composes);

    const auto curves = iclp::load_csv(in);
    const Eigen::MatrixXd xm = iclp::ReadMatrix(x);
    const iclp::GridSpec& grid = curves.front().grid();
    const iclp::KernelSpec spec = kernel.Spec(grid);
    const iclp::SpectralBasis b = iclp::decompose(spec, grid, kernel.floor_rel);
    const iclp::FosRelease r =
        iclp::dp_fos_regression(xm, curves, b, gamma, psi, eta, tau, bx, budget, seed);
    iclp::save_csv(r.beta, out);
    json t1 = json::array();
    for (Eigen::Index a = 0; a < r.t1.rows(); ++a) {
      std::vector<double> row(r.t1.cols());
      for (Eigen::Index c = 0; c < r.t1.cols(); ++c) row[c] = r.t1(a, c);
      t1.push_back(row);
    }
    json cols = json::array();
    for (const auto& t : r.t2) cols.push_back(ReleaseJson(t));
    json j = {{"mechanism", "fos-regression"},
              {"epsilon", eps},
              {"delta", 0.0},
              {"gamma", gamma},
              {"bx", bx},
              {"seed", seed},
              {"n", xm.rows()},
              {"p", xm.cols()},
              {"t1", t1},
              {"t1_sensitivity", r.t1_sensitivity},
              {"t1_laplace_scale", r.t1_scale},
              {"t2", cols},
              {"kernel", KernelJson(spec, kernel)},
              {"grid", GridJson(grid)},
              {"floor_rel", b.floor_rel},
              {"input", in},
              {"covariates", x},
              {"output", out},
              {"composition", ComposedBudget(ledger, budget)},
              {"version", kVersion}};
    WriteText(MetaPath(out, meta), j.dump(2) + "\n");
    AppendLedger(ledger, "fos sanitize", out, budget, seed);
    return kOk;
  }
};

struct SelectPss {
  KernelOptions kernel;
  DomainOptions domain;
  int n = 0;
  double eps = 0.0;
  std::string strategy = "qr";
  std::optional<double> beta, eta;
  std::string out;

  void Add(CLI::App* app) {
    kernel.Add(app, "matern32", "trace");
    domain.Add(app, 200);
    app->add_option("--n", n, "sample size")->required();
    app->add_option("--eps", eps, "privacy budget epsilon")->required();
    app->add_option("--strategy", strategy, "qr or frl")
        ->check(CLI::IsMember({"qr", "frl"}))
        ->capture_default_str();
    app->add_option("--beta", beta, "eigenvalue decay (default: fitted from the kernel)");
    app->add_option("--eta", eta, "FRL power (default: the QR choice)");
    app->add_option("--out", out, "also write the JSON here");
  }

  int Run() {
    kernel.Validate();
    ICLP_REQUIRE(n >= 2, ConfigError, "--n must be at least 2");
    RequirePositive(eps, "--eps");
    int j_max = domain.k;
    double b = 0.0;
    if (beta) {
      b = *beta;
    } else {
      const iclp::SpectralBasis basis = kernel.Basis(domain.Grid());
      b = iclp::fit_decay(basis, 5, std::min(50, basis.size()));
      j_max = basis.size();
    }
    const iclp::PssChoice qr = iclp::pss_qr(n, eps, b);
    json j;
    if (strategy == "qr") {
      j = {{"strategy", "iclp-qr"}, {"psi", qr.psi}, {"eta", qr.eta},
           {"psi_min", qr.psi_min}};
    } else {
      const iclp::PssChoice f = iclp::pss_frl(n, b, eta.value_or(qr.eta), j_max);
      j = {{"strategy", "frl"}, {"m_lo", f.m_lo}, {"m_hi", f.m_hi},
           {"empty_range", f.empty_range()}, {"eta", f.eta}};
    }
    j["beta_hat"] = b;
    j["n"] = n;
    j["eps"] = eps;
    j["note"] = qr.note;
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!out.empty()) WriteText(out, text);
    return kOk;
  }
};

struct VerifyDp {
  KernelOptions kernel;
  std::string in, neighbor;
  double eps = 0.0;
  std::optional<double> sigma;
  int draws = 10000;
  std::uint64_t seed = 0;

  void Add(CLI::App* app) {
    kernel.Add(app, "matern32", "trace");
    app->add_option("--in", in, "CSV whose first curve is f_D")->required();
    app->add_option("--neighbor", neighbor, "CSV whose first curve is f_D'")->required();
    app->add_option("--eps", eps, "privacy budget epsilon")->required();
    app->add_option("--sigma", sigma,
                    "ICLP noise scale (default: calibrated to this pair)");
    app->add_option("--draws", draws, "Monte-Carlo draws")->capture_default_str();
    app->add_option("--seed", seed, "draw seed")->required();
  }

  int Run() {
    kernel.Validate();
    const iclp::PrivacyBudget budget{eps, 0.0};
    budget.Validate();
    if (sigma) {
      ICLP_REQUIRE(*sigma >= 0 && std::isfinite(*sigma), ConfigError,
                   "--sigma must be nonnegative");
    }
    ICLP_REQUIRE(draws >= 1, ConfigError, "--draws must be at least 1");
    RequireReadable(in, "--in");
    RequireReadable(neighbor, "--neighbor");

    const auto a = iclp::load_csv(in);
    const auto b = iclp::load_csv(neighbor);
    iclp::RequireSameGrid(a.front().grid(), b.front().grid());
    const iclp::SpectralBasis basis = kernel.Basis(a.front().grid());
    const double dist = iclp::weighted_l1_norm_coeffs(
        iclp::project(a.front(), basis) - iclp::project(b.front(), basis), basis);
    const double s =
        sigma.value_or(iclp::calibrate(dist, budget, iclp::NoiseProcess::kIclp));
    const iclp::DpCheckResult r =
        iclp::dp_ratio_check(a.front(), b.front(), basis, s, budget, draws, seed);
    json j = {{"max_log_ratio", r.max_log_ratio},
              {"bound", r.bound},
              {"epsilon", r.epsilon},
              {"sigma", s},
              {"distance_1c", dist},
              {"draws", r.draws},
              {"certified", r.certified}};
    std::cout << j.dump(2) << '\n';
    return r.certified ? kOk : kPrivacy;
  }
};

struct BenchExperiment {
  std::string kind;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;

  void Add(CLI::App* app) {
    app->add_option("--config", config, "JSON experiment config")->required();
    app->add_option("--seed", seed, "override the config's master seed");
    app->add_option("--out", out, "CSV path (default: standard output)");
  }

  int Run() {
    json c = iclp::ReadJsonFile(config);
    ICLP_REQUIRE(c.is_object(), ConfigError, "config must be a JSON object");
    c["kind"] = kind;
    if (seed) c["seed"] = *seed;
    const std::string csv = iclp::run_experiment(c);
    if (out.empty()) {
      std::cout << csv;
    } else {
      WriteText(out, csv);
    }
    return kOk;
  }
};

struct BenchTiming {
  std::vector<int> ks{100, 200, 500};
  int draws = 100, repeats = 3;
  std::uint64_t seed = 0;
  std::string out;

  void Add(CLI::App* app) {
    app->add_option("--K", ks, "grid sizes, comma separated")
        ->delimiter(',')
        ->capture_default_str();
    app->add_option("--draws", draws, "paths per batch")->capture_default_str();
    app->add_option("--repeats", repeats, "timed repeats per batch (fastest kept)")
        ->capture_default_str();
    app->add_option("--seed", seed, "draw seed")->required();
    app->add_option("--out", out, "CSV path (default: standard output)");
  }

  int Run() {
    ICLP_REQUIRE(draws >= 0 && repeats >= 1, ConfigError,
                 "--draws must be >= 0 and --repeats >= 1");
    std::ostringstream csv;
    csv << "K,j_max,decomposition_seconds,factorization_seconds,iclp_seconds,"
           "gp_seconds,ratio\n";
    for (const auto& r : iclp::timing(ks, draws, seed, repeats)) {
      csv << r.k << ',' << r.j_max << ',' << iclp::FormatDouble(r.decomposition_seconds)
          << ',' << iclp::FormatDouble(r.factorization_seconds) << ','
          << iclp::FormatDouble(r.iclp_seconds) << ','
          << iclp::FormatDouble(r.gp_seconds) << ',' << iclp::FormatDouble(r.ratio())
          << '\n';
    }
    if (out.empty()) {
      std::cout << csv.str();
    } else {
      WriteText(out, csv.str());
    }
    return kOk;
  }
};

// Names the first positional word that does not match a subcommand.
std::optional<std::string> UnknownSubcommand(const CLI::App& app, int argc,
                                             char** argv) {
  const CLI::App* level = &app;
  for (int i = 1; i < argc; ++i) {
    const std::string word = argv[i];
    if (word.empty() || word[0] == '-') return std::nullopt;
    const CLI::App* next = nullptr;
    for (const CLI::App* sub : level->get_subcommands({})) {
      if (sub->get_name() == word) next = sub;
    }
    if (next == nullptr) return "unknown subcommand '" + word + "'";
    level = next;
  }
  return std::nullopt;
}

int Fail(int code, const char* kind, const std::string& message) {
  std::cerr << "iclp: error[" << code << ":" << kind << "] " << message << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private functional summaries", "iclp"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  KernelEig kernel_eig;
  NoiseSample noise_sample;
  MeanSanitize mean_sanitize;
  KdeSanitize kde_sanitize;
  CovSanitize cov_sanitize;
  FosSanitize fos_sanitize;
  SelectPss select_pss;
  VerifyDp verify_dp;
  BenchExperiment bench_mean, bench_kde;
  bench_mean.kind = "mean";
  bench_kde.kind = "kde";
  BenchTiming bench_timing;

  std::function<int()> run;
  auto leaf = [&](CLI::App* group, const std::string& name, const std::string& help,
                  auto& command) {
    CLI::App* sub = group->add_subcommand(name, help);
    command.Add(sub);
    sub->callback([&run, &command] { run = [&command] { return command.Run(); }; });
  };
  auto group = [&](const std::string& name, const std::string& help) {
    CLI::App* g = app.add_subcommand(name, help);
    g->require_subcommand(1);
    return g;
  };

  leaf(group("kernel", "kernel spectra"), "eig", "eigendecomposition on a grid",
       kernel_eig);
  leaf(group("noise", "noise processes"), "sample", "draw ICLP or GP paths",
       noise_sample);
  leaf(group("mean", "mean functions"), "sanitize", "private mean release",
       mean_sanitize);
  leaf(group("kde", "densities"), "sanitize", "private kernel density estimate",
       kde_sanitize);
  leaf(group("cov", "covariance surfaces"), "sanitize", "private covariance release",
       cov_sanitize);
  leaf(group("fos", "function-on-scalar regression"), "sanitize",
       "private coefficient curves", fos_sanitize);
  leaf(group("select", "tuning"), "pss", "data-independent tuning", select_pss);
  leaf(group("verify", "checks"), "dp", "privacy-loss check for a neighbor pair",
       verify_dp);
  CLI::App* bench = group("bench", "Monte-Carlo benchmarks");
  leaf(bench, "mean", "mean-estimation experiment", bench_mean);
  leaf(bench, "kde", "density-estimation experiment", bench_kde);
  leaf(bench, "timing", "ICLP versus GP sampling time", bench_timing);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help();
    return Fail(kConfig, "config", UnknownSubcommand(app, argc, argv).value_or(e.what()));
  }

  try {
    return run();
  } catch (const iclp::ConfigError& e) {
    return Fail(kConfig, "config", e.what());
  } catch (const iclp::PrivacyError& e) {
    return Fail(kPrivacy, "privacy", e.what());
  } catch (const iclp::Error& e) {
    return Fail(kData, "data", e.what());
  } catch (const std::exception& e) {
    return Fail(kData, "data", e.what());
  }
}
