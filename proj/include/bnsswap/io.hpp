#pragma once

#include <string>

#include <json.hpp>

#include "bnsswap/covariance.hpp"
#include "bnsswap/levy.hpp"
#include "bnsswap/market.hpp"
#include "bnsswap/mc.hpp"
#include "bnsswap/model.hpp"
#include "bnsswap/pricing.hpp"

namespace bnsswap::io {

using json = nlohmann::json;

inline constexpr const char* kParamsSchema = "bnsswap.params/1";
inline constexpr const char* kCovSchema = "bnsswap.cov/1";
inline constexpr const char* kContractSchema = "bnsswap.contract/1";
inline constexpr const char* kPricingSchema = "bnsswap.pricing/1";
inline constexpr const char* kReportSchema = "bnsswap.report/1";

json to_json(const levy::SubordinatorSpec& spec);
levy::SubordinatorSpec subordinator_from_json(const json& j);

json to_json(const ModelParams& params);
ModelParams params_from_json(const json& j);

json to_json(const ExpectedCovMatrix& cov);
ExpectedCovMatrix cov_from_json(const json& j);

json to_json(const SwapContract& contract);
SwapContract contract_from_json(const json& j);

json to_json(const PricingResult& result);

json to_json(const mc::Summary& summary, const mc::SimulationConfig& config);

json to_json(const market::DescriptiveStats& stats);

/// Accepts the params layout with every field optional; "sigma0" may replace "sigma0sq",
/// and gamma may be a matrix or {"g12", "g23", "g31"}.
market::Overrides overrides_from_json(const json& j);

/// {"P": 3x3 rows, "F": 3}.
ReproductionBasis reproduction_from_json(const json& j);

json matrix_to_json(const Eigen::Matrix3d& m);  // rows
Eigen::Matrix3d matrix_from_json(const json& j);  // rows or row-major 9

/// Parses a JSON file; InputError names the path on failure.
json read_json_file(const std::string& path);

/// Serialises with every floating-point number at 17 significant digits; NaN and inf as null.
std::string dump(const json& j, int indent = 2);

}  // namespace bnsswap::io
