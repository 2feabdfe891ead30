// bnsswap: calibrate BNS parameters from prices, price trace / max-eigenvalue swaps,
// and check the analytic covariance routes against Monte Carlo.
//
// Exit codes: 0 ok, 1 internal error, 2 input error, 3 estimation error,
// 4 infeasible contract, 5 verification failure.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bnsswap/covariance.hpp"
#include "bnsswap/errors.hpp"
#include "bnsswap/io.hpp"
#include "bnsswap/market.hpp"
#include "bnsswap/mc.hpp"
#include "bnsswap/pricing.hpp"

using namespace bnsswap;
using io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitEstimation = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitVerify = 5;

// |z| above this fails verify.
constexpr double kVerifyZ = 4.0;

std::uint64_t default_seed() {
  if (const char* s = std::getenv("BNSSWAP_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw InputError(std::string("BNSSWAP_SEED is not an unsigned integer: ") + s);
    }
  }
  return mc::SimulationConfig{}.seed;
}

json report(const std::string& command) {
  return {{"schema", io::kReportSchema}, {"command", command}, {"version", BNSSWAP_VERSION}};
}

json matrix_flat(const Eigen::Matrix3d& m) {
  json a = json::array();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) a.push_back(m(i, k));
  return a;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << text << '\n';
  if (!out) throw InputError("write failed: " + path);
}

struct CalibrateArgs {
  std::string prices, overrides, out;
};

json run_calibrate(const CalibrateArgs& a) {
  const auto series = market::load_prices(a.prices);
  market::Overrides ov;
  if (!a.overrides.empty()) ov = io::overrides_from_json(io::read_json_file(a.overrides));
  const ModelParams params = market::estimate_params(series, ov);

  json r = report("calibrate");
  r["params"] = io::to_json(params);
  json stats = json::object();
  for (const auto& s : series) stats[s.asset_id] = io::to_json(market::descriptive_stats(s));
  r["results"] = {{"descriptiveStats", stats}, {"paramsFile", a.out}};
  r["diagnostics"] = {{"rows", series[0].prices.size()}, {"warnings", params.validate()}};
  write_file(a.out, io::dump(io::to_json(params)));
  return r;
}

struct PriceArgs {
  std::string params, contract, method = "series", omega, reproduction;
};

json run_price(const PriceArgs& a) {
  const SwapContract contract = io::contract_from_json(io::read_json_file(a.contract));
  std::optional<ModelParams> params;
  if (!a.params.empty()) params = io::params_from_json(io::read_json_file(a.params));

  ExpectedCovMatrix cov;
  if (a.method == "fixture-omega") {
    if (a.omega.empty()) throw ArgumentError("--method fixture-omega needs --omega");
    cov = io::cov_from_json(io::read_json_file(a.omega));
    cov.method = Method::fixture;
  } else {
    if (!params) throw ArgumentError("--method " + a.method + " needs --params");
    const Method m = method_from_string(a.method);
    if (m != Method::series && m != Method::approx)
      throw ArgumentError("--method must be series, approx or fixture-omega");
    cov = expected_cov_matrix(*params, m);
  }

  json r = report("price");
  if (params) r["params"] = io::to_json(*params);
  r["contract"] = io::to_json(contract);
  json results = {{"covariance", io::to_json(cov)}};
  json diag = {{"warnings", cov.warnings}};

  if (contract.kind == SwapKind::trace) {
    results["pricing"] = io::to_json(price_trace(cov, contract));
  } else {
    if (!a.reproduction.empty()) {
      const auto basis = io::reproduction_from_json(io::read_json_file(a.reproduction));
      results["reproduction"] = io::to_json(price_eigenvalue_reproduction(cov, basis, contract));
    }
    if (params) {
      Eigen::Vector3d mu;
      for (int i = 0; i < 3; ++i) mu(i) = params->assets[i].mu;
      results["pricing"] = io::to_json(price_eigenvalue(cov, mu, contract));
    } else if (a.reproduction.empty()) {
      throw ArgumentError("max-eigenvalue pricing needs --params (for mu) or --reproduction");
    }
  }
  r["results"] = results;
  r["diagnostics"] = diag;
  return r;
}

struct VerifyArgs {
  std::string params;
  std::int64_t paths = 100000;
  int steps = 2520;
  std::uint64_t seed = 0;
  int threads = 0;
  bool antithetic = false;
};

json run_verify(const VerifyArgs& a, bool& failed) {
  const ModelParams params = io::params_from_json(io::read_json_file(a.params));
  mc::SimulationConfig cfg;
  cfg.n_paths = a.paths;
  cfg.n_steps = a.steps;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  cfg.antithetic = a.antithetic;
  cfg.validate();

  const ExpectedCovMatrix series = expected_cov_matrix(params, Method::series);
  const ExpectedCovMatrix approx = expected_cov_matrix(params, Method::approx);
  const mc::Summary sim = mc::summarize(params, cfg);

  // With Zero subordinators the Monte Carlo estimate is deterministic, so the standard error is
  // floored at a rounding-level multiple of the entry.
  auto z_scores = [&](const Eigen::Matrix3d& analytic, double& worst) {
    Eigen::Matrix3d z;
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) {
        const double floor = 1e-9 * std::abs(sim.mean(i, k)) + 1e-300;
        z(i, k) = (analytic(i, k) - sim.mean(i, k)) / std::max(sim.stderr(i, k), floor);
        worst = std::max(worst, std::abs(z(i, k)));
      }
    }
    return z;
  };
  double worst = 0.0;
  const Eigen::Matrix3d z_series = z_scores(series.entries, worst);
  const Eigen::Matrix3d z_approx = z_scores(approx.entries, worst);
  failed = !(worst <= kVerifyZ);

  json r = report("verify");
  r["seed"] = a.seed;
  r["params"] = io::to_json(params);
  r["results"] = {{"series", matrix_flat(series.entries)},
                  {"approx", matrix_flat(approx.entries)},
                  {"mc", io::to_json(sim, cfg)},
                  {"zSeries", matrix_flat(z_series)},
                  {"zApprox", matrix_flat(z_approx)},
                  {"maxAbsZ", worst},
                  {"threshold", kVerifyZ},
                  {"pass", !failed}};
  json warnings = series.warnings;
  for (const auto& w : approx.warnings) warnings.push_back(w);
  r["diagnostics"] = {{"warnings", warnings}};
  return r;
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const InfeasibleTargetError& e) {
    std::cerr << "bnsswap: infeasible contract: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ConstraintDegeneracyError& e) {
    std::cerr << "bnsswap: infeasible contract: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const EstimationError& e) {
    std::cerr << "bnsswap: estimation failed: " << e.what() << '\n';
    return kExitEstimation;
  } catch (const InputError& e) {
    std::cerr << "bnsswap: " << e.what() << '\n';
    return kExitInput;
  } catch (const ParameterError& e) {
    std::cerr << "bnsswap: invalid parameters: " << e.what() << '\n';
    return kExitInput;
  } catch (const ArgumentError& e) {
    std::cerr << "bnsswap: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "bnsswap: error: " << e.what() << '\n';
    return kExitInternal;
  }
}

void emit(json r, std::chrono::steady_clock::time_point start) {
  r["wallTimeSeconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << io::dump(r) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BNS multi-asset trace and max-eigenvalue swap pricing"};
  app.set_version_flag("--version", BNSSWAP_VERSION);
  app.require_subcommand(1);

  CalibrateArgs ca;
  auto* cal = app.add_subcommand("calibrate", "estimate model parameters from a price CSV");
  cal->add_option("--prices", ca.prices, "CSV with header date,asset1,asset2,asset3")->required();
  cal->add_option("--overrides", ca.overrides, "JSON with parameter values that replace estimates");
  cal->add_option("--out", ca.out, "params JSON to write")->required();

  PriceArgs pa;
  auto* pr = app.add_subcommand("price", "price a trace or max-eigenvalue swap");
  pr->add_option("--params", pa.params, "params JSON");
  pr->add_option("--contract", pa.contract, "contract JSON")->required();
  pr->add_option("--method", pa.method, "series | approx | fixture-omega")
      ->check(CLI::IsMember({"series", "approx", "fixture-omega"}));
  pr->add_option("--omega", pa.omega, "covariance JSON for --method fixture-omega");
  pr->add_option("--reproduction", pa.reproduction, "JSON with given P and F (max-eigenvalue only)");

  VerifyArgs va;
  std::optional<std::uint64_t> seed;
  auto* ve = app.add_subcommand("verify", "compare analytic routes with Monte Carlo");
  ve->add_option("--params", va.params, "params JSON")->required();
  ve->add_option("--paths", va.paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
  ve->add_option("--steps", va.steps, "time steps over [0, T]")->check(CLI::PositiveNumber);
  ve->add_option("--seed", seed, "seed (default: $BNSSWAP_SEED or built-in)");
  ve->add_option("--threads", va.threads, "worker threads, 0 = all cores");
  ve->add_flag("--antithetic", va.antithetic, "antithetic Gaussian pairs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  const auto start = std::chrono::steady_clock::now();
  if (cal->parsed()) {
    return guarded([&] {
      emit(run_calibrate(ca), start);
      return kExitOk;
    });
  }
  if (pr->parsed()) {
    return guarded([&] {
      emit(run_price(pa), start);
      return kExitOk;
    });
  }
  return guarded([&] {
    va.seed = seed ? *seed : default_seed();
    bool failed = false;
    emit(run_verify(va, failed), start);
    return failed ? kExitVerify : kExitOk;
  });
}
