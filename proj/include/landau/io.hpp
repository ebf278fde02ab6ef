#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "landau/numerics.hpp"

namespace landau {

// All writers use %.17g so CSVs round-trip doubles exactly.
void write_mode_csv(const std::filesystem::path& path, const ModeSeries& s);
void write_profile_csv(const std::filesystem::path& path, const std::vector<double>& z,
                       const std::vector<double>& value, const std::vector<double>& dvalue);
// Long format: one row per (t, z) sample with columns t, z, <value>, <dvalue>.
void write_field_csv(const std::filesystem::path& path, const SpaceTimeField& f,
                     const std::string& value_name, const std::string& dvalue_name);
void write_scalar_field_csv(const std::filesystem::path& path, const SpaceTimeField& f,
                            const std::string& value_name);
// Dense matrix: first row holds the column coordinates, first column the row coordinates.
void write_matrix_csv(const std::filesystem::path& path, const std::vector<double>& rows,
                      const std::vector<double>& cols, const std::vector<double>& data);
void read_matrix_csv(const std::filesystem::path& path, std::vector<double>& rows,
                     std::vector<double>& cols, std::vector<double>& data);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace landau
