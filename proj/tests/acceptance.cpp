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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits 0 when
// the failing set equals the one passed with --expected-fail (default: none).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "iclp/experiment.hpp"
#include "iclp/iclp.hpp"

namespace iclp {
namespace {

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

SpectralBasis MeanBasis() {
  const GridSpec g = GridSpec::Line(200);
  return decompose(normalize_trace(KernelSpec::Matern(1.5, 0.1), g), g);
}

// 1. Worst-case neighbors tau phi_1 vs -tau phi_1, 10,000 draws each.
Outcome Certificates() {
  const auto t0 = Clock::now();
  const SpectralBasis b = MeanBasis();
  const double tau = 4.0;
  const int n = 200;
  Scenario s(ScenarioSpec{}, b);
  Eigen::MatrixXd d = s.Curves(DeriveSeed(1, {kDataStream, 0}), n);
  d.col(0) = tau * b.eigenfunctions.col(0);
  Eigen::MatrixXd dp = d;
  dp.col(0) = -d.col(0);
  const double beta = fit_decay(b, 5, 50);
  std::ostringstream detail;
  bool ok = true;
  for (double eps : {0.5, 1.0}) {
    const PssChoice qr = pss_qr(n, eps, beta);
    const PssChoice fr = pss_frl(n, beta, qr.eta, b.size());
    for (const MechanismConfig& c :
         {MechanismConfig::Frl(fr.m_hi, tau), MechanismConfig::IclpAr(0.01, qr.eta, tau),
          MechanismConfig::IclpQr(qr.psi, qr.eta, tau)}) {
      const SanitizedRelease r = SanitizeMeanValues(d, b, c, {eps, 0.0}, 7);
      const SanitizedRelease rp = SanitizeMeanValues(dp, b, c, {eps, 0.0}, 7);
      const DpCheckResult chk = dp_ratio_check_coefficients(
          r.non_private_coefficients, rp.non_private_coefficients, r.noise_scales,
          {eps, 0.0}, 10000, DeriveSeed(11, {std::uint64_t(c.strategy)}));
      ok = ok && chk.max_log_ratio <= eps + 1e-9;
      detail << ToString(c.strategy) << "@" << eps << "="
             << Fmt("%.4f", chk.max_log_ratio) << " ";
    }
  }
  const double secs = Since(t0);
  detail << Fmt("(%.1f s)", secs);
  return {ok && secs < 60.0, detail.str()};
}

// 2. Decay of Matérn spectra on K = 500.
Outcome SpectralDecay() {
  const auto t0 = Clock::now();
  const GridSpec g = GridSpec::Line(500);
  const double b15 = fit_decay(decompose(KernelSpec::Matern(1.5, 0.1), g), 5, 50);
  const double b25 = fit_decay(decompose(KernelSpec::Matern(2.5, 0.1), g), 5, 50);
  const double secs = Since(t0);
  const bool ok = b15 >= 3.4 && b15 <= 4.6 && b25 >= 5.1 && b25 <= 6.9 && secs < 30;
  return {ok, "slope(1.5)=" + Fmt("%.4f", -b15) + " in [-4.6,-3.4], slope(2.5)=" +
                  Fmt("%.4f", -b25) + " in [-6.9,-5.1]" + Fmt(" (%.1f s)", secs)};
}

struct MeanRuns {
  std::vector<MCResult> qr;  // n = 250, 1000, 4000
  MCResult ar_best;          // n = 4000
  double seconds = 0.0;
};

MeanRuns RunScenarioOne() {
  const auto t0 = Clock::now();
  MeanRuns out;
  MeanBenchConfig cfg;
  cfg.scenario = MeanScenario::kS1;
  cfg.tau = 4.0;
  cfg.seed = 2024;
  cfg.strategies = {Strategy::kIclpQr};
  RunMeanBench(cfg, &out.qr);
  cfg.ns = {4000};
  cfg.strategies = {Strategy::kIclpAr};
  std::vector<MCResult> ar;
  RunMeanBench(cfg, &ar);
  out.ar_best = ar.front();
  out.seconds = Since(t0);
  return out;
}

// 3. QR + PSS mean rate.
Outcome MeanRate(const MeanRuns& r) {
  std::vector<double> ns, mse;
  for (const auto& m : r.qr) {
    ns.push_back(m.n);
    mse.push_back(m.mse_mean);
  }
  const double slope = LogLogSlope(ns, mse);
  return {std::abs(slope + 1.0) <= 0.3 && r.seconds < 600,
          "slope=" + Fmt("%.3f", slope) + " (target -1 +/- 0.3), mse=" +
              Fmt("%.4g", mse[0]) + "," + Fmt("%.4g", mse[1]) + "," + Fmt("%.4g", mse[2]) +
              Fmt(" (%.1f s)", r.seconds)};
}

// 4. Privacy error over statistical error decreases in n.
Outcome FreePrivacy(const MeanRuns& r) {
  std::vector<double> ratio;
  for (const auto& m : r.qr) ratio.push_back(m.priv_err_mean / m.stat_err_mean);
  const bool ok = ratio[1] < ratio[0] && ratio[2] < ratio[1];
  return {ok, "priv/stat=" + Fmt("%.4f", ratio[0]) + "," + Fmt("%.4f", ratio[1]) + "," +
                  Fmt("%.4f", ratio[2])};
}

// 5. Best-grid AR against PSS QR at n = 4000.
Outcome ArSuboptimal(const MeanRuns& r) {
  const MCResult& qr = r.qr.back();
  return {r.ar_best.mse_mean > qr.mse_mean,
          "ar(psi=" + Fmt("%g", r.ar_best.config.psi) + ")=" +
              Fmt("%.5g", r.ar_best.mse_mean) + " > qr=" + Fmt("%.5g", qr.mse_mean)};
}

// 6. Ordering on scenario 3 with the one-standard-error allowance.
Outcome Ordering(std::vector<std::string>& warnings) {
  MeanBenchConfig cfg;
  cfg.scenario = MeanScenario::kS3;
  cfg.tau = 2.0;
  cfg.seed = 2024;
  cfg.ns = {1000};
  cfg.strategies = {Strategy::kIclpQr, Strategy::kFrl, Strategy::kIclpAr, Strategy::kGpAdp};
  std::vector<MCResult> res;
  RunMeanBench(cfg, &res);
  const MCResult &qr = res[0], &frl = res[1], &ar = res[2], &gp = res[3];
  bool ok = true;
  auto check = [&](const MCResult& lo, const MCResult& hi, const char* what) {
    if (lo.mse_mean <= hi.mse_mean) return;
    const double se = std::hypot(lo.mse_se, hi.mse_se);
    if (lo.mse_mean - hi.mse_mean <= se) {
      warnings.push_back(std::string("criterion 6: ") + what + " inverted within 1 s.e.");
    } else {
      ok = false;
    }
  };
  check(qr, frl, "qr <= frl");
  check(qr, ar, "qr <= ar");
  check(gp, qr, "gp-adp <= qr");
  return {ok, "qr=" + Fmt("%.4g", qr.mse_mean) + " frl=" + Fmt("%.4g", frl.mse_mean) +
                  " ar=" + Fmt("%.4g", ar.mse_mean) + " gp-adp=" + Fmt("%.4g", gp.mse_mean)};
}

// 7. KDE risk rate with h = n^(-1/5).
Outcome KdeRate() {
  const auto t0 = Clock::now();
  KdeBenchConfig cfg;
  cfg.seed = 2024;
  const auto res = RunKdeBench(cfg);
  std::vector<double> ns, risk;
  for (const auto& r : res) {
    ns.push_back(r.n);
    risk.push_back(r.stats.mse_mean);
  }
  const double slope = LogLogSlope(ns, risk);
  const double secs = Since(t0);
  return {std::abs(slope + 0.8) <= 0.25 && secs < 600,
          "slope=" + Fmt("%.3f", slope) + " (target -0.8 +/- 0.25)" +
              Fmt(" (%.1f s)", secs)};
}

// 8. KDE sensitivity scaling in n and h^d.
Outcome KdeScaling() {
  const GridSpec g = GridSpec::Line(200);
  const KernelSpec k = KernelSpec::Gaussian(0.1);
  const SpectralBasis b = decompose(k, g);
  const Eigen::MatrixXd p1 = gen_mixture_points(MixtureSetting::k1D, 500, 1);
  Eigen::MatrixXd p2(1000, 1);
  p2 << p1, p1;
  const double h = std::pow(500.0, -0.2);
  const double d1 = dp_kde(p1, b, k, 2.0, h, {1.0, 0.0}, 1).delta_gs;
  const double d2 = dp_kde(p2, b, k, 2.0, h, {1.0, 0.0}, 1).delta_gs;
  const double d3 = dp_kde(p1, b, k, 2.0, h / 2, {1.0, 0.0}, 1).delta_gs;

  const GridSpec g2 = MixtureDomain(MixtureSetting::k2D, 30);
  const KernelSpec k2 = KernelSpec::Exponential(1.0);
  const SpectralBasis b2 = decompose(k2, g2);
  const Eigen::MatrixXd q = gen_mixture_points(MixtureSetting::k2D, 200, 2);
  const double e1 = dp_kde(q, b2, k2, 2.0, 1.0, {1.0, 0.0}, 1).delta_gs;
  const double e2 = dp_kde(q, b2, k2, 2.0, std::sqrt(0.5), {1.0, 0.0}, 1).delta_gs;

  const double r_n = d2 / d1, r_h = d3 / d1, r_h2 = e2 / e1;
  const double tol = 4 * std::numeric_limits<double>::epsilon();
  const bool ok = std::abs(r_n - 0.5) <= tol && std::abs(r_h - 2.0) <= 2 * tol &&
                  std::abs(r_h2 - 2.0) <= 2 * tol;
  return {ok, "2n: " + Fmt("%.17g", r_n) + ", h^d/2 (1D): " + Fmt("%.17g", r_h) +
                  ", h^d/2 (2D): " + Fmt("%.17g", r_h2)};
}

// 9. Coefficient variance and excess kurtosis at 50,000 draws.
Outcome SamplerMoments() {
  const SpectralBasis b = MeanBasis();
  const int draws = 50000, m = 5;
  const Eigen::MatrixXd proj =
      b.eigenfunctions.leftCols(m).transpose() * b.grid.weights().asDiagonal();
  Eigen::MatrixXd c(m, draws);
  for (int d = 0; d < draws; ++d) {
    c.col(d) = proj * sample_iclp(b, 1.0, DeriveSeed(909, {std::uint64_t(d)})).path.values();
  }
  bool ok = true;
  std::ostringstream detail;
  for (int j = 0; j < m; ++j) {
    const Eigen::ArrayXd x = c.row(j).transpose().array() - c.row(j).mean();
    const double var = x.square().mean();
    const double kurt = x.pow(4).mean() / (var * var) - 3.0;
    const double rel = var / b.eigenvalues(j);
    ok = ok && std::abs(rel - 1) <= 0.05 && std::abs(kurt - 3) <= 0.5;
    detail << "j" << j + 1 << ":var/l=" << Fmt("%.3f", rel) << ",kurt=" << Fmt("%.2f", kurt)
           << " ";
  }
  return {ok, detail.str()};
}

// 10. Batch time ratio; absolute seconds are informational.
Outcome Timing() {
  const auto rows = timing({100, 200, 500}, 100, 5, 3);
  bool ok = true;
  std::ostringstream detail;
  for (const auto& r : rows) {
    ok = ok && r.ratio() <= 2.5;
    detail << "K=" << r.k << ":ratio=" << Fmt("%.2f", r.ratio())
           << Fmt(",iclp=%.2e s", r.iclp_seconds) << Fmt(",gp=%.2e s ", r.gp_seconds);
  }
  return {ok, detail.str()};
}

// 11. Bit-identical reruns.
Outcome Reproducible() {
  const nlohmann::json mean = {{"scenario", "S3"},
                               {"strategies", {"iclp-qr", "frl", "iclp-ar", "gp-adp"}},
                               {"n", {100, 400}},
                               {"replicates", 10},
                               {"seed", 77},
                               {"tau", 2.0}};
  const nlohmann::json kde = {{"kind", "kde"}, {"n", {100, 400}}, {"replicates", 10},
                              {"seed", 77}};
  const bool a = run_experiment(mean) == run_experiment(mean);
  const bool k = run_experiment(kde) == run_experiment(kde);
  return {a && k, std::string("mean csv ") + (a ? "identical" : "differs") + ", kde csv " +
                      (k ? "identical" : "differs")};
}

// Reference with explicit loops in long double.
long double RermReference(double m, double psi, const SpectralBasis& b, double eta, int n) {
  long double sup = 0;
  for (int x = 0; x < b.grid.size(); ++x) {
    long double s = 0;
    for (int j = 0; j < b.size(); ++j) {
      const long double p = b.eigenfunctions(x, j);
      s += std::pow(static_cast<long double>(b.eigenvalues(j)),
                    static_cast<long double>(eta)) * p * p;
    }
    if (s > sup) sup = s;
  }
  long double tr = 0;
  for (int j = 0; j < b.size(); ++j) {
    tr += std::pow(static_cast<long double>(b.eigenvalues(j)),
                   static_cast<long double>(eta) - 1);
  }
  return static_cast<long double>(m) / (static_cast<long double>(psi) * n) *
         std::sqrt(sup) * std::sqrt(tr);
}

// 12. RERM bound against an independent evaluation on 20 random tuples.
Outcome Rerm() {
  Rng rng(1212);
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    const int k = 40 + static_cast<int>(rng() % 80);
    const double rho = 0.05 + 0.3 * rng.Uniform();
    const KernelSpec spec = t % 3 == 0   ? KernelSpec::Gaussian(rho)
                            : t % 3 == 1 ? KernelSpec::Matern(1.5, rho)
                                         : KernelSpec::Exponential(rho);
    const SpectralBasis b = decompose(spec, GridSpec::Line(k), 1e-10);
    const double m = 0.1 + 5 * rng.Uniform();
    const double psi = std::pow(10.0, -3 + 3 * rng.Uniform());
    const double eta = 1.05 + 1.5 * rng.Uniform();
    const int n = 10 + static_cast<int>(rng() % 5000);
    const double got = rerm_sensitivity(m, psi, b, eta, n);
    const long double ref = RermReference(m, psi, b, eta, n);
    worst = std::max(worst, static_cast<double>(std::abs(got - ref) / ref));
  }
  return {worst <= 1e-12, "max relative difference " + Fmt("%.2e", worst)};
}

}  // namespace
}  // namespace iclp

int main(int argc, char** argv) {
  using iclp::Outcome;
  std::set<int> expected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--expected-fail" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string tok; std::getline(ss, tok, ',');) expected.insert(std::stoi(tok));
    }
  }

  std::vector<std::string> warnings;
  std::set<int> failed;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("%s %2d %-22s %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) failed.insert(id);
  };
  auto guarded = [&](int id, const char* name, const std::function<Outcome()>& f) {
    try {
      report(id, name, f());
    } catch (const std::exception& e) {
      report(id, name, {false, std::string("error: ") + e.what()});
    }
  };

  guarded(1, "dp-certificate", iclp::Certificates);
  guarded(2, "spectral-decay", iclp::SpectralDecay);
  iclp::MeanRuns s1;
  bool have_s1 = true;
  try {
    s1 = iclp::RunScenarioOne();
  } catch (const std::exception& e) {
    have_s1 = false;
    for (int id : {3, 4, 5}) report(id, "scenario-1", {false, e.what()});
  }
  if (have_s1) {
    guarded(3, "mean-rate", [&] { return iclp::MeanRate(s1); });
    guarded(4, "free-privacy", [&] { return iclp::FreePrivacy(s1); });
    guarded(5, "ar-suboptimal", [&] { return iclp::ArSuboptimal(s1); });
  }
  guarded(6, "mechanism-ordering", [&] { return iclp::Ordering(warnings); });
  guarded(7, "kde-rate", iclp::KdeRate);
  guarded(8, "kde-sensitivity", iclp::KdeScaling);
  guarded(9, "sampler-moments", iclp::SamplerMoments);
  guarded(10, "timing-ratio", iclp::Timing);
  guarded(11, "reproducibility", iclp::Reproducible);
  guarded(12, "rerm-bound", iclp::Rerm);

  for (const auto& w : warnings) std::printf("WARN %s\n", w.c_str());
  std::printf("%zu of 12 criteria passed", 12 - failed.size());
  if (!expected.empty()) {
    std::printf("; expected failures:");
    for (int id : expected) std::printf(" %d", id);
  }
  std::printf("\n");
  return failed == expected ? 0 : 1;
}
