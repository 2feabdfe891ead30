#include "bnsswap/mc.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "bnsswap/errors.hpp"
#include "bnsswap/optimize.hpp"

namespace bnsswap::mc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Entry order of the per-path vectors: 00, 11, 22, 01, 12, 02.
constexpr std::array<std::array<int, 2>, 6> kEntries{{{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 2}, {0, 2}}};
using Entries = std::array<double, 6>;

Eigen::Matrix3d to_matrix(const Entries& e) {
  Eigen::Matrix3d m;
  for (int k = 0; k < 6; ++k) m(kEntries[k][0], kEntries[k][1]) = m(kEntries[k][1], kEntries[k][0]) = e[k];
  return m;
}

// Constants shared by all paths.
struct Model {
  double lambda = 0.0;
  double T = 0.0;
  std::array<double, 3> r_load{};
  std::array<double, 3> s_load{};
  std::array<double, 3> rho{};
  std::array<double, 3> drift{};  // r - lambda kappa(rho_i)
  Eigen::Matrix3d gamma;
  Eigen::Matrix3d chol;
  levy::SubordinatorSpec z1, zs, zss;
  std::array<double, 3> sigma0sq{};
  std::array<double, 3> x0{};

  explicit Model(const ModelParams& p) {
    p.validate();
    lambda = p.lambda;
    T = p.T;
    z1 = p.triple.z1;
    zs = p.triple.z_star;
    zss = p.triple.z_star_star;
    gamma = p.gamma;
    for (int i = 0; i < 3; ++i) {
      r_load[i] = p.triple.loading(i);
      s_load[i] = p.triple.own_loading(i);
      rho[i] = p.assets[i].rho;
      sigma0sq[i] = p.assets[i].sigma0sq;
      double k;
      try {
        k = levy::cgf(z1, rho[i]);
      } catch (const DomainError& e) {
        throw ParameterError("leverage rho of asset " + std::to_string(i + 1) +
                             " is outside the CGF domain of Z^1: " + e.what());
      }
      drift[i] = p.r - lambda * k;
    }
    Eigen::Matrix3d g = p.gamma + 1e-12 * Eigen::Matrix3d::Identity();
    Eigen::LLT<Eigen::Matrix3d> llt(g);
    if (llt.info() != Eigen::Success) throw ParameterError("gamma has no Cholesky factor");
    chol = llt.matrixL();
  }

  // E[sum J^2 | g] = c g^2 for an increment of Z^1 over subordinator time L
  double qv_factor(double L) const {
    if (z1.family() == levy::Family::zero) return 0.0;
    return levy::jump_square_sum(z1, 1.0, L);
  }
};

// Probability that a step's increment is placed as a single event rather than spread at a
// constant rate over the step. Lumping gives Var[Z_s | Z_dt = g] = g^2 s (1 - s) (in step
// fractions), spreading gives 0; mixing with p = kappa2 / (kappa2 + kappa1^2 L) reproduces the
// bridge variance g^2 s (1 - s) / (1 + a L) of a Gamma process and its average for other laws.
double lump_probability(const levy::SubordinatorSpec& z, double L) {
  if (z.family() == levy::Family::zero) return 1.0;
  return levy::jump_square_sum(z, 1.0, L);
}

// x + expm1(-x), without cancellation for small x
double ramp_shortfall(double x) {
  if (x < 1e-3) return x * x * (0.5 - x * (1.0 / 6.0 - x * (1.0 / 24.0 - x / 120.0)));
  return x + std::expm1(-x);
}

struct StepDraws {
  std::array<double, 3> g{};  // increments of Z^1, Z*, Z**
  std::array<double, 3> u{};  // event positions as fractions of the step
  std::array<bool, 3> lump{};  // single event (true) or constant rate over the step
  std::array<double, 3> xi{};
};

struct PathState {
  std::array<double, 3> v{};
  std::array<double, 3> sd{};
  std::array<double, 3> x{};
  Entries integral{};  // int sigma_i sigma_j over elapsed time
  double qv = 0.0;

  void reset(const Model& m) {
    for (int i = 0; i < 3; ++i) {
      v[i] = m.sigma0sq[i];
      sd[i] = std::sqrt(v[i]);
      x[i] = m.x0[i];
    }
    integral.fill(0.0);
    qv = 0.0;
  }

  // OU decay over h with constant inflow `rate` per asset. Without inflow everything is closed
  // form; with inflow the cross terms sqrt(v_i v_j) use Simpson's rule on the segment.
  void segment(const Model& m, double h, const std::array<double, 3>& rate, bool has_rate,
               std::array<double, 3>& step_var) {
    if (h <= 0.0) return;
    const double lh = m.lambda * h;
    const double fac = -std::expm1(-lh) / m.lambda;
    if (!has_rate) {
      const double half = std::exp(-0.5 * lh);
      for (int i = 0; i < 3; ++i) step_var[i] += v[i] * fac;
      integral[3] += sd[0] * sd[1] * fac;
      integral[4] += sd[1] * sd[2] * fac;
      integral[5] += sd[0] * sd[2] * fac;
      for (int i = 0; i < 3; ++i) {
        sd[i] *= half;
        v[i] = sd[i] * sd[i];
      }
      return;
    }
    const double decay = std::exp(-lh);
    const double decay_mid = std::exp(-0.5 * lh);
    const double fac_mid = -std::expm1(-0.5 * lh) / m.lambda;
    const double inflow = ramp_shortfall(lh) / (m.lambda * m.lambda);
    std::array<double, 3> sm{}, se{};
    for (int i = 0; i < 3; ++i) {
      step_var[i] += v[i] * fac + rate[i] * inflow;
      sm[i] = std::sqrt(decay_mid * v[i] + rate[i] * fac_mid);
      v[i] = decay * v[i] + rate[i] * fac;
      se[i] = std::sqrt(v[i]);
    }
    const double w = h / 6.0;
    integral[3] += w * (sd[0] * sd[1] + 4.0 * sm[0] * sm[1] + se[0] * se[1]);
    integral[4] += w * (sd[1] * sd[2] + 4.0 * sm[1] * sm[2] + se[1] * se[2]);
    integral[5] += w * (sd[0] * sd[2] + 4.0 * sm[0] * sm[2] + se[0] * se[2]);
    sd = se;
  }

  void jump(const Model& m, int driver, double g) {
    if (g == 0.0) return;
    if (driver == 0) {
      for (int i = 0; i < 3; ++i) v[i] += m.r_load[i] * g;
    } else {
      v[driver] += m.s_load[driver] * g;
    }
    for (int i = 0; i < 3; ++i) sd[i] = std::sqrt(v[i]);
  }

  void advance(const Model& m, double dt, const StepDraws& d, double qv_increment, bool track_x) {
    std::array<int, 3> order{};
    int events = 0;
    std::array<double, 3> rate{};
    bool has_rate = false;
    for (int k = 0; k < 3; ++k) {
      if (d.g[k] == 0.0) continue;
      if (d.lump[k]) {
        order[events++] = k;
        continue;
      }
      has_rate = true;
      if (k == 0) {
        for (int i = 0; i < 3; ++i) rate[i] += m.r_load[i] * d.g[0] / dt;
      } else {
        rate[k] += m.s_load[k] * d.g[k] / dt;
      }
    }
    std::sort(order.begin(), order.begin() + events, [&](int a, int b) { return d.u[a] < d.u[b]; });
    std::array<double, 3> step_var{};
    double prev = 0.0;
    for (int e = 0; e < events; ++e) {
      const int k = order[e];
      const double tk = d.u[k] * dt;
      segment(m, tk - prev, rate, has_rate, step_var);
      prev = std::max(prev, tk);
      jump(m, k, d.g[k]);
    }
    segment(m, dt - prev, rate, has_rate, step_var);
    for (int i = 0; i < 3; ++i) integral[i] += step_var[i];
    qv += qv_increment;
    if (track_x) {
      Eigen::Vector3d z = m.chol * Eigen::Vector3d(d.xi[0], d.xi[1], d.xi[2]);
      for (int i = 0; i < 3; ++i) {
        x[i] += m.drift[i] * dt - 0.5 * step_var[i] + std::sqrt(step_var[i]) * z(i) + m.rho[i] * d.g[0];
      }
    }
  }

  Entries realized(const Model& m) const {
    Entries out;
    for (int k = 0; k < 6; ++k) {
      const int i = kEntries[k][0], j = kEntries[k][1];
      out[k] = (m.gamma(i, j) * integral[k] + m.rho[i] * m.rho[j] * qv) / m.T;
    }
    return out;
  }
};

// Independent random streams of one path: jumps, Gaussian shocks, coupling choices.
struct Streams {
  RandomStream jumps;
  RandomStream gauss;
  RandomStream extra;
  Streams(std::uint64_t seed, std::uint64_t index)
      : jumps(path_seed(seed, 3 * index)),
        gauss(path_seed(seed, 3 * index + 1)),
        extra(path_seed(seed, 3 * index + 2)) {}
};

struct Samplers {
  levy::IncrementSampler z1, zs, zss;
  std::array<double, 3> p_lump{};
  std::uniform_real_distribution<double> uniform{0.0, 1.0};
  std::normal_distribution<double> normal{0.0, 1.0};
  Samplers(const Model& m, double dt)
      : z1(m.z1, m.lambda * dt),
        zs(m.zs, m.lambda * dt),
        zss(m.zss, m.lambda * dt),
        p_lump{lump_probability(m.z1, m.lambda * dt), lump_probability(m.zs, m.lambda * dt),
               lump_probability(m.zss, m.lambda * dt)} {}

  void draw(Streams& s, StepDraws& d, bool track_x, bool negate) {
    d.g[0] = z1(s.jumps);
    d.g[1] = zs(s.jumps);
    d.g[2] = zss(s.jumps);
    for (int k = 0; k < 3; ++k) d.u[k] = uniform(s.jumps);
    for (int k = 0; k < 3; ++k) d.lump[k] = uniform(s.jumps) < p_lump[k];
    if (track_x) {
      for (int k = 0; k < 3; ++k) d.xi[k] = negate ? -normal(s.gauss) : normal(s.gauss);
    }
  }
};

struct PathOutput {
  Entries realized{};
  std::array<double, 3> sigma2_T{};
  std::array<double, 3> x_T{};
};

// Simulates one path; fills `full` with trajectories if non-null.
PathOutput run_path(const Model& m, const SimulationConfig& cfg, std::int64_t path, bool track_x,
                    PathRecord* full) {
  const std::uint64_t stream = cfg.antithetic ? static_cast<std::uint64_t>(path / 2)
                                              : static_cast<std::uint64_t>(path);
  const bool negate = cfg.antithetic && (path % 2 == 1);
  Streams streams(cfg.seed, stream);
  const double dt = m.T / cfg.n_steps;
  Samplers samplers(m, dt);
  const double qv_c = m.qv_factor(m.lambda * dt);
  PathState st;
  st.reset(m);
  StepDraws d;
  if (full) {
    full->sigma2.reserve(cfg.n_steps + 1);
    full->x.reserve(cfg.n_steps + 1);
    full->dz.reserve(cfg.n_steps);
    full->sigma2.push_back(st.v);
    full->x.push_back(st.x);
  }
  for (int k = 0; k < cfg.n_steps; ++k) {
    samplers.draw(streams, d, track_x, negate);
    st.advance(m, dt, d, qv_c * d.g[0] * d.g[0], track_x);
    if (full) {
      full->sigma2.push_back(st.v);
      full->x.push_back(st.x);
      full->dz.push_back(d.g);
    }
  }
  return {st.realized(m), st.v, st.x};
}

int thread_count(const SimulationConfig& cfg, std::int64_t work) {
  int n = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  n = std::max(1, n);
  return static_cast<int>(std::min<std::int64_t>(n, std::max<std::int64_t>(1, work)));
}

template <class F>
void parallel_for(std::int64_t n, int threads, F&& body) {
  if (threads <= 1) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const std::int64_t chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        const std::int64_t lo = t * chunk;
        const std::int64_t hi = std::min(n, lo + chunk);
        for (std::int64_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Neumaier-compensated running sum.
struct Sum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x)) {
      c += (s - t) + x;
    } else {
      c += (x - t) + s;
    }
    s = t;
  }
  double value() const { return s + c; }
};

struct Stats {
  double mean = 0.0;
  double stderr = 0.0;
};

// Mean and standard error of samples, in index order.
template <class Get>
Stats sample_stats(std::int64_t n, Get&& get) {
  Sum s;
  for (std::int64_t i = 0; i < n; ++i) s.add(get(i));
  const double mean = s.value() / static_cast<double>(n);
  if (n < 2) return {mean, 0.0};
  Sum ss;
  for (std::int64_t i = 0; i < n; ++i) {
    const double d = get(i) - mean;
    ss.add(d * d);
  }
  const double var = ss.value() / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

// Per-sample realized entries: averages antithetic pairs into one sample.
std::vector<Entries> per_sample(const std::vector<Entries>& per_path, bool antithetic) {
  if (!antithetic) return per_path;
  std::vector<Entries> out((per_path.size() + 1) / 2);
  for (std::size_t p = 0; p < out.size(); ++p) {
    const auto& a = per_path[2 * p];
    if (2 * p + 1 < per_path.size()) {
      const auto& b = per_path[2 * p + 1];
      for (int k = 0; k < 6; ++k) out[p][k] = 0.5 * (a[k] + b[k]);
    } else {
      out[p] = a;
    }
  }
  return out;
}

std::vector<Entries> realized_per_path(const Model& m, const SimulationConfig& cfg) {
  std::vector<Entries> out(cfg.n_paths);
  parallel_for(cfg.n_paths, thread_count(cfg, cfg.n_paths), [&](std::int64_t p) {
    out[p] = run_path(m, cfg, p, false, nullptr).realized;
  });
  return out;
}

Summary summary_of(const std::vector<Entries>& samples) {
  Summary s;
  s.n_samples = static_cast<std::int64_t>(samples.size());
  for (int k = 0; k < 6; ++k) {
    const auto st = sample_stats(s.n_samples, [&](std::int64_t i) { return samples[i][k]; });
    const int i = kEntries[k][0], j = kEntries[k][1];
    s.mean(i, j) = s.mean(j, i) = st.mean;
    s.stderr(i, j) = s.stderr(j, i) = st.stderr;
  }
  return s;
}

}  // namespace

void SimulationConfig::validate() const {
  if (n_paths < 1) throw ArgumentError("nPaths must be at least 1");
  if (n_steps < 1) throw ArgumentError("nSteps must be at least 1");
  if (threads < 0) throw ArgumentError("threads must be nonnegative");
}

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

PathBundle simulate(const ModelParams& params, const SimulationConfig& config) {
  config.validate();
  const Model m(params);
  const bool track_x = config.record != Record::summary;
  const bool full = config.record == Record::full;
  PathBundle bundle;
  bundle.paths.resize(config.n_paths);
  if (full) {
    bundle.times.resize(config.n_steps + 1);
    for (int k = 0; k <= config.n_steps; ++k) bundle.times[k] = params.T * k / config.n_steps;
  }
  parallel_for(config.n_paths, thread_count(config, config.n_paths), [&](std::int64_t p) {
    auto& rec = bundle.paths[p];
    const auto out = run_path(m, config, p, track_x, full ? &rec : nullptr);
    rec.realized = to_matrix(out.realized);
    rec.sigma2_T = out.sigma2_T;
    rec.x_T = out.x_T;
  });
  return bundle;
}

Summary summarize(const ModelParams& params, const SimulationConfig& config) {
  config.validate();
  const Model m(params);
  return summary_of(per_sample(realized_per_path(m, config), config.antithetic));
}

ExpectedCovMatrix mc_expected_cov(const ModelParams& params, const SimulationConfig& config) {
  const auto s = summarize(params, config);
  ExpectedCovMatrix out;
  out.method = Method::mc;
  out.entries = s.mean;
  out.warnings = params.validate();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out.diagnostics[i][j].stderr = s.stderr(i, j);
  }
  return out;
}

PricingResult mc_price(const ModelParams& params, const SwapContract& contract,
                       const SimulationConfig& config) {
  contract.validate();
  config.validate();
  const Model m(params);
  const auto samples = per_sample(realized_per_path(m, config), config.antithetic);
  const auto n = static_cast<std::int64_t>(samples.size());

  // payoff per sample is a linear functional c . entries
  Entries c{};
  PricingResult out;
  if (contract.kind == SwapKind::trace) {
    c = {1.0, 1.0, 1.0, 0.0, 0.0, 0.0};
  } else {
    const auto mean = summary_of(samples).mean;
    Eigen::Vector3d mu;
    for (int i = 0; i < 3; ++i) mu(i) = params.assets[i].mu;
    const auto basis = qr_constraint_basis(mu, contract.target_return);
    const auto fw = feasible_weights(basis, mean);
    const auto& w = fw.w;
    c = {w(0) * w(0), w(1) * w(1), w(2) * w(2), 2 * w(0) * w(1), 2 * w(1) * w(2), 2 * w(0) * w(2)};
    out.basis = basis;
    out.weights = fw;
  }
  const auto st = sample_stats(n, [&](std::int64_t i) {
    double v = 0.0;
    for (int k = 0; k < 6; ++k) v += c[k] * samples[i][k];
    return v;
  });
  out.discount = contract.discount();
  out.expected_metric = st.mean;
  out.price = out.discount * (st.mean - contract.strike);
  out.stderr = out.discount * st.stderr;
  out.method = "mc";
  return out;
}

GridBias grid_bias(const ModelParams& params, const SimulationConfig& config) {
  config.validate();
  const Model m(params);
  const int n = config.n_steps;
  const double dt = m.T / n;
  const double h = 0.5 * dt;

  std::vector<Entries> coarse(config.n_paths), fine(config.n_paths);
  parallel_for(config.n_paths, thread_count(config, config.n_paths), [&](std::int64_t p) {
    Streams streams(config.seed, static_cast<std::uint64_t>(p));
    Samplers half(m, h);
    const Samplers whole(m, dt);
    const double qv_fine = m.qv_factor(m.lambda * h);
    const double qv_coarse = m.qv_factor(m.lambda * dt);
    PathState f, c;
    f.reset(m);
    c.reset(m);
    StepDraws a, b, joint;
    for (int k = 0; k < n; ++k) {
      half.draw(streams, a, false, false);
      half.draw(streams, b, false, false);
      f.advance(m, h, a, qv_fine * a.g[0] * a.g[0], false);
      f.advance(m, h, b, qv_fine * b.g[0] * b.g[0], false);
      // the coarse event sits at one of the two fine positions, chosen with probability
      // proportional to the fine increments, which keeps its position uniform on the step
      for (int d = 0; d < 3; ++d) {
        const double g = a.g[d] + b.g[d];
        joint.g[d] = g;
        const bool first = g > 0.0 ? half.uniform(streams.extra) * g < a.g[d]
                                   : half.uniform(streams.extra) < 0.5;
        joint.u[d] = first ? 0.5 * a.u[d] : 0.5 + 0.5 * b.u[d];
        joint.lump[d] = half.uniform(streams.extra) < whole.p_lump[d];
      }
      c.advance(m, dt, joint, qv_coarse * joint.g[0] * joint.g[0], false);
    }
    coarse[p] = c.realized(m);
    fine[p] = f.realized(m);
  });

  GridBias out;
  out.n_samples = config.n_paths;
  for (int k = 0; k < 6; ++k) {
    const int i = kEntries[k][0], j = kEntries[k][1];
    const auto sc = sample_stats(config.n_paths, [&](std::int64_t q) { return coarse[q][k]; });
    const auto sf = sample_stats(config.n_paths, [&](std::int64_t q) { return fine[q][k]; });
    const auto sd =
        sample_stats(config.n_paths, [&](std::int64_t q) { return fine[q][k] - coarse[q][k]; });
    out.coarse(i, j) = out.coarse(j, i) = sc.mean;
    out.fine(i, j) = out.fine(j, i) = sf.mean;
    out.fine_stderr(i, j) = out.fine_stderr(j, i) = sf.stderr;
    out.difference(i, j) = out.difference(j, i) = sd.mean;
    out.difference_stderr(i, j) = out.difference_stderr(j, i) = sd.stderr;
  }
  return out;
}

}  // namespace bnsswap::mc
