#pragma once

#include "fit2/felm_training.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace fit2
{

/// Bit-exact text form of a double, e.g. "-0x1.8p+1".
std::string to_hex(double v);
double from_hex(std::string_view s);

/// Shortest decimal text that parses back to the same double.
std::string to_decimal(double v);

inline constexpr const char* model_format_name = "fit2felm-model";
inline constexpr int model_format_major = 1;
inline constexpr int model_format_minor = 0;

nlohmann::json model_to_json(const Classifier& model);
Classifier model_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const Classifier& model);
Classifier load_model(const std::filesystem::path& path);

/// Accepts "MAJOR.MINOR"; throws ValidationError naming `what` when MAJOR differs.
void check_format_version(const nlohmann::json& j, std::string_view what, int major);

/// Column names written by gen-data.
inline const std::vector<std::string> sonar_feature_names{"r180", "r172", "r164", "r156", "r148"};

void write_dataset_csv(std::ostream& out, const Dataset& data);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

/// Header: feature names followed by "label". Errors carry the line number.
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::filesystem::path& path);

} // namespace fit2
