#include "bnsswap/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bnsswap/errors.hpp"

namespace bnsswap::io {

namespace {

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(where + ": missing field '" + key + "'");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  return j.get<double>();
}

double number_field(const json& j, const char* key, const std::string& where) {
  return number(field(j, key, where), where + "." + key);
}

std::optional<double> optional_number(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return number(j.at(key), where + "." + key);
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json diag_to_json(const EntryDiagnostics& d) {
  return {{"quadratureError", number_or_null(d.quadrature_error)},
          {"seriesTail", number_or_null(d.series_tail)},
          {"seriesTailAtZero", number_or_null(d.series_tail_t0)},
          {"stderr", number_or_null(d.stderr)}};
}

double nan_if_null(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return kNotApplicable;
  return j.at(key).get<double>();
}

BetaBounds beta_from_json(const json& j, const std::string& where) {
  BetaBounds b;
  const auto mode = field(j, "mode", where).get<std::string>();
  if (mode == "adaptive") {
    b.mode = BetaMode::adaptive;
  } else if (mode == "fixed") {
    b.mode = BetaMode::fixed;
    b.b12 = number_field(j, "b12", where);
    b.b23 = number_field(j, "b23", where);
    b.b31 = number_field(j, "b31", where);
  } else {
    throw InputError(where + ": beta mode must be 'adaptive' or 'fixed'");
  }
  return b;
}

json beta_to_json(const BetaBounds& b) {
  if (b.mode == BetaMode::adaptive) return {{"mode", "adaptive"}};
  return {{"mode", "fixed"}, {"b12", b.b12}, {"b23", b.b23}, {"b31", b.b31}};
}

void write(std::string& out, const json& j, int indent, int level) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent) * (level + 1), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent) * level, ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        out += json(it.key()).dump();
        out += sep;
        write(out, it.value(), indent, level + 1);
      }
      out += nl;
      out += close_pad;
      out += "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      out += "[";
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) out += flat ? ", " : ",";
        if (!flat) {
          out += nl;
          out += pad;
        }
        write(out, j[k], indent, level + 1);
      }
      if (!flat) {
        out += nl;
        out += close_pad;
      }
      out += "]";
      return;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      std::string s(buf);
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      out += s;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

json to_json(const levy::SubordinatorSpec& spec) {
  return {{"family", levy::to_string(spec.family())}, {"a", spec.a()}, {"b", spec.b()}};
}

levy::SubordinatorSpec subordinator_from_json(const json& j) {
  const std::string where = "subordinator";
  try {
    const auto fam = levy::family_from_string(field(j, "family", where).get<std::string>());
    switch (fam) {
      case levy::Family::gamma:
        return levy::SubordinatorSpec::gamma(number_field(j, "a", where), number_field(j, "b", where));
      case levy::Family::inverse_gaussian:
        return levy::SubordinatorSpec::inverse_gaussian(number_field(j, "a", where),
                                                        number_field(j, "b", where));
      case levy::Family::zero:
        return levy::SubordinatorSpec::zero();
    }
  } catch (const ArgumentError& e) {
    throw InputError(where + ": " + e.what());
  }
  return levy::SubordinatorSpec::zero();
}

json matrix_to_json(const Eigen::Matrix3d& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
  return rows;
}

Eigen::Matrix3d matrix_from_json(const json& j) {
  Eigen::Matrix3d m;
  if (j.is_array() && j.size() == 9) {
    for (int k = 0; k < 9; ++k) m(k / 3, k % 3) = number(j[k], "matrix");
    return m;
  }
  if (!j.is_array() || j.size() != 3) throw InputError("matrix: expected 3 rows or 9 row-major values");
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_array() || j[i].size() != 3) throw InputError("matrix: each row needs 3 values");
    for (int c = 0; c < 3; ++c) m(i, c) = number(j[i][c], "matrix");
  }
  return m;
}

json to_json(const ModelParams& p) {
  json assets = json::array();
  for (const auto& a : p.assets) assets.push_back({{"mu", a.mu}, {"sigma0sq", a.sigma0sq}, {"rho", a.rho}});
  return {{"schema", kParamsSchema},
          {"assets", assets},
          {"lambda", p.lambda},
          {"gamma", matrix_to_json(p.gamma)},
          {"subordinators",
           {{"r2", p.triple.r2},
            {"r3", p.triple.r3},
            {"z1", to_json(p.triple.z1)},
            {"zStar", to_json(p.triple.z_star)},
            {"zStarStar", to_json(p.triple.z_star_star)}}},
          {"r", p.r},
          {"T", p.T},
          {"beta", beta_to_json(p.beta)},
          {"kmax", p.kmax}};
}

ModelParams params_from_json(const json& j) {
  const std::string where = "params";
  try {
    ModelParams p;
    const auto& assets = field(j, "assets", where);
    if (!assets.is_array() || assets.size() != 3) throw InputError(where + ".assets: expected 3 entries");
    for (int i = 0; i < 3; ++i) {
      const std::string w = where + ".assets[" + std::to_string(i) + "]";
      p.assets[i].mu = number_field(assets[i], "mu", w);
      p.assets[i].sigma0sq = number_field(assets[i], "sigma0sq", w);
      p.assets[i].rho = number_field(assets[i], "rho", w);
    }
    p.lambda = number_field(j, "lambda", where);
    p.gamma = matrix_from_json(field(j, "gamma", where));
    const auto& s = field(j, "subordinators", where);
    p.triple.r2 = number_field(s, "r2", where + ".subordinators");
    p.triple.r3 = number_field(s, "r3", where + ".subordinators");
    p.triple.z1 = subordinator_from_json(field(s, "z1", where));
    p.triple.z_star = subordinator_from_json(field(s, "zStar", where));
    p.triple.z_star_star = subordinator_from_json(field(s, "zStarStar", where));
    p.r = number_field(j, "r", where);
    p.T = number_field(j, "T", where);
    if (j.contains("beta")) p.beta = beta_from_json(j.at("beta"), where + ".beta");
    if (j.contains("kmax")) p.kmax = field(j, "kmax", where).get<int>();
    return p;
  } catch (const json::exception& e) {
    throw InputError(where + ": " + e.what());
  }
}

json to_json(const ExpectedCovMatrix& cov) {
  json entries = json::array();
  json diags = json::array();
  for (int i = 0; i < 3; ++i) {
    for (int c = 0; c < 3; ++c) {
      entries.push_back(cov.entries(i, c));
      diags.push_back(diag_to_json(cov.diagnostics[i][c]));
    }
  }
  return {{"schema", kCovSchema},
          {"entries", entries},
          {"method", to_string(cov.method)},
          {"diagnostics", diags},
          {"warnings", cov.warnings}};
}

ExpectedCovMatrix cov_from_json(const json& j) {
  const std::string where = "covariance matrix";
  try {
    ExpectedCovMatrix cov;
    cov.entries = matrix_from_json(field(j, "entries", where));
    cov.method = j.contains("method") ? method_from_string(j.at("method").get<std::string>()) : Method::fixture;
    if (j.contains("diagnostics") && j.at("diagnostics").is_array() && j.at("diagnostics").size() == 9) {
      for (int k = 0; k < 9; ++k) {
        const auto& d = j.at("diagnostics")[k];
        auto& out = cov.diagnostics[k / 3][k % 3];
        out.quadrature_error = nan_if_null(d, "quadratureError");
        out.series_tail = nan_if_null(d, "seriesTail");
        out.series_tail_t0 = nan_if_null(d, "seriesTailAtZero");
        out.stderr = nan_if_null(d, "stderr");
      }
    }
    if ((cov.entries - cov.entries.transpose()).cwiseAbs().maxCoeff() > 1e-15) {
      throw InputError(where + ": entries are not symmetric");
    }
    return cov;
  } catch (const json::exception& e) {
    throw InputError(where + ": " + e.what());
  } catch (const ArgumentError& e) {
    throw InputError(where + ": " + e.what());
  }
}

json to_json(const SwapContract& c) {
  return {{"schema", kContractSchema},
          {"kind", to_string(c.kind)},
          {"strike", c.strike},
          {"T", c.T},
          {"rate", c.rate},
          {"targetReturn", c.target_return}};
}

SwapContract contract_from_json(const json& j) {
  const std::string where = "contract";
  try {
    SwapContract c;
    c.kind = swap_kind_from_string(field(j, "kind", where).get<std::string>());
    c.strike = number_field(j, "strike", where);
    c.T = number_field(j, "T", where);
    c.rate = number_field(j, "rate", where);
    c.target_return = optional_number(j, "targetReturn", where).value_or(0.0);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw InputError(where + ": " + e.what());
  } catch (const ArgumentError& e) {
    throw InputError(where + ": " + e.what());
  }
}

json to_json(const PricingResult& r) {
  json out = {{"schema", kPricingSchema},
              {"price", r.price},
              {"expectedMetric", r.expected_metric},
              {"discount", r.discount},
              {"method", r.method},
              {"stderr", number_or_null(r.stderr)},
              {"notes", r.notes}};
  if (r.basis) {
    json P = matrix_to_json(r.basis->P);
    out["basis"] = {{"P", P},
                    {"R", {{r.basis->R(0, 0), r.basis->R(0, 1)}, {r.basis->R(1, 0), r.basis->R(1, 1)}}},
                    {"b", {r.basis->b(0), r.basis->b(1)}}};
  }
  if (r.weights) {
    const auto& w = *r.weights;
    out["weights"] = {{"q", {w.q(0), w.q(1)}},
                      {"rmag", w.rmag},
                      {"F", {w.F(0), w.F(1), w.F(2)}},
                      {"w", {w.w(0), w.w(1), w.w(2)}},
                      {"sign", w.sign},
                      {"lambdaValue", w.lambda_value},
                      {"otherSignLambda", w.other_lambda}};
  }
  if (r.reproduction_weights) {
    const auto& w = *r.reproduction_weights;
    out["reproductionWeights"] = {w(0), w(1), w(2)};
  }
  return out;
}

json to_json(const mc::Summary& s, const mc::SimulationConfig& c) {
  json mean = json::array(), se = json::array();
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) {
      mean.push_back(s.mean(i, k));
      se.push_back(s.stderr(i, k));
    }
  }
  return {{"mean", mean},
          {"stderr", se},
          {"nPaths", c.n_paths},
          {"nSteps", c.n_steps},
          {"seed", c.seed},
          {"antithetic", c.antithetic},
          {"nSamples", s.n_samples}};
}

json to_json(const market::DescriptiveStats& s) {
  return {{"n", s.n},           {"mean", s.mean},     {"stdError", s.std_error},
          {"ci95HalfWidth", s.ci95_half_width},      {"min", s.min},
          {"max", s.max},       {"range", s.range},   {"median", s.median},
          {"stdDev", s.std_dev}};
}

market::Overrides overrides_from_json(const json& j) {
  const std::string where = "overrides";
  market::Overrides o;
  try {
    if (!j.is_object()) throw InputError(where + ": expected a JSON object");
    if (j.contains("assets")) {
      const auto& a = j.at("assets");
      if (!a.is_array() || a.size() != 3) throw InputError(where + ".assets: expected 3 entries");
      for (int i = 0; i < 3; ++i) {
        const std::string w = where + ".assets[" + std::to_string(i) + "]";
        o.assets[i].mu = optional_number(a[i], "mu", w);
        o.assets[i].sigma0sq = optional_number(a[i], "sigma0sq", w);
        if (!o.assets[i].sigma0sq) {
          if (const auto s0 = optional_number(a[i], "sigma0", w)) o.assets[i].sigma0sq = *s0 * *s0;
        }
        o.assets[i].rho = optional_number(a[i], "rho", w);
      }
    }
    o.lambda = optional_number(j, "lambda", where);
    if (j.contains("gamma")) {
      const auto& g = j.at("gamma");
      if (g.is_object()) {
        o.g12 = optional_number(g, "g12", where + ".gamma");
        o.g23 = optional_number(g, "g23", where + ".gamma");
        o.g31 = optional_number(g, "g31", where + ".gamma");
      } else {
        const auto m = matrix_from_json(g);
        o.g12 = m(0, 1);
        o.g23 = m(1, 2);
        o.g31 = m(0, 2);
      }
    }
    if (j.contains("subordinators")) {
      const auto& s = j.at("subordinators");
      o.r2 = optional_number(s, "r2", where + ".subordinators");
      o.r3 = optional_number(s, "r3", where + ".subordinators");
      if (s.contains("z1")) o.z1 = subordinator_from_json(s.at("z1"));
      if (s.contains("zStar")) o.z_star = subordinator_from_json(s.at("zStar"));
      if (s.contains("zStarStar")) o.z_star_star = subordinator_from_json(s.at("zStarStar"));
    }
    o.r = optional_number(j, "r", where);
    o.T = optional_number(j, "T", where);
    if (j.contains("beta")) o.beta = beta_from_json(j.at("beta"), where + ".beta");
    if (j.contains("kmax")) o.kmax = j.at("kmax").get<int>();
  } catch (const json::exception& e) {
    throw InputError(where + ": " + e.what());
  }
  return o;
}

ReproductionBasis reproduction_from_json(const json& j) {
  const std::string where = "reproduction basis";
  try {
    ReproductionBasis b;
    b.P = matrix_from_json(field(j, "P", where));
    const auto& F = field(j, "F", where);
    if (!F.is_array() || F.size() != 3) throw InputError(where + ".F: expected 3 values");
    for (int k = 0; k < 3; ++k) b.F(k) = number(F[k], where + ".F");
    return b;
  } catch (const json::exception& e) {
    throw InputError(where + ": " + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string dump(const json& j, int indent) {
  std::string out;
  write(out, j, indent, 0);
  return out;
}

}  // namespace bnsswap::io
