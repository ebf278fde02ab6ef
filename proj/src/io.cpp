#include "landau/io.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace landau {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  File f(std::fopen(path.c_str(), "w"));
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  return f;
}

}  // namespace

void write_mode_csv(const std::filesystem::path& path, const ModeSeries& s) {
  File f = open_out(path);
  std::fprintf(f.get(), "t,Re,Im\n");
  for (size_t j = 0; j < s.values.size(); ++j)
    std::fprintf(f.get(), "%.17g,%.17g,%.17g\n", s.grid.t(static_cast<int>(j)), s.values[j].real(),
                 s.values[j].imag());
}

void write_profile_csv(const std::filesystem::path& path, const std::vector<double>& z,
                       const std::vector<double>& value, const std::vector<double>& dvalue) {
  File f = open_out(path);
  std::fprintf(f.get(), "z,value,dvalue\n");
  for (size_t j = 0; j < z.size(); ++j)
    std::fprintf(f.get(), "%.17g,%.17g,%.17g\n", z[j], value[j], dvalue[j]);
}

void write_field_csv(const std::filesystem::path& path, const SpaceTimeField& fld,
                     const std::string& value_name, const std::string& dvalue_name) {
  File f = open_out(path);
  std::fprintf(f.get(), "t,z,%s,%s\n", value_name.c_str(), dvalue_name.c_str());
  for (int it = 0; it < fld.nt(); ++it)
    for (int iz = 0; iz < fld.nz(); ++iz)
      std::fprintf(f.get(), "%.17g,%.17g,%.17g,%.17g\n", fld.t[it], fld.z[iz], fld.v(it, iz),
                   fld.dv(it, iz));
}

void write_scalar_field_csv(const std::filesystem::path& path, const SpaceTimeField& fld,
                            const std::string& value_name) {
  File f = open_out(path);
  std::fprintf(f.get(), "t,z,%s\n", value_name.c_str());
  for (int it = 0; it < fld.nt(); ++it)
    for (int iz = 0; iz < fld.nz(); ++iz)
      std::fprintf(f.get(), "%.17g,%.17g,%.17g\n", fld.t[it], fld.z[iz], fld.v(it, iz));
}

void write_matrix_csv(const std::filesystem::path& path, const std::vector<double>& rows,
                      const std::vector<double>& cols, const std::vector<double>& data) {
  File f = open_out(path);
  std::fprintf(f.get(), "t\\z");
  for (double c : cols) std::fprintf(f.get(), ",%.17g", c);
  std::fprintf(f.get(), "\n");
  for (size_t i = 0; i < rows.size(); ++i) {
    std::fprintf(f.get(), "%.17g", rows[i]);
    for (size_t j = 0; j < cols.size(); ++j)
      std::fprintf(f.get(), ",%.17g", data[i * cols.size() + j]);
    std::fprintf(f.get(), "\n");
  }
}

void read_matrix_csv(const std::filesystem::path& path, std::vector<double>& rows,
                     std::vector<double>& cols, std::vector<double>& data) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  rows.clear();
  cols.clear();
  data.clear();
  std::string line, cell;
  std::getline(in, line);
  {
    std::stringstream ss(line);
    std::getline(ss, cell, ',');
    while (std::getline(ss, cell, ',')) cols.push_back(std::stod(cell));
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::getline(ss, cell, ',');
    rows.push_back(std::stod(cell));
    while (std::getline(ss, cell, ',')) data.push_back(std::stod(cell));
  }
  if (data.size() != rows.size() * cols.size())
    throw Error("matrix csv " + path.string() + " is ragged");
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON in ") + path.string() + ": " + e.what());
  }
}

}  // namespace landau
