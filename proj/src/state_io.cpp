#include "tnspec/state_io.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace tnspec {

void save_state(const PureState& psi, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::json manifest;
  manifest["format_version"] = 1;
  manifest["kind"] = "dense";
  manifest["L"] = psi.num_sites;
  manifest["phys_dim"] = psi.phys_dim;
  manifest["scalar"] = "complex128";
  manifest["endianness"] = "little";
  manifest["file"] = "state.bin";
  std::ofstream f(fs::path(dir) / "state.bin", std::ios::binary);
  for (const cx& z : psi.tensor.data()) {
    const double re = static_cast<double>(z.real());
    const double im = static_cast<double>(z.imag());
    f.write(reinterpret_cast<const char*>(&re), sizeof(double));
    f.write(reinterpret_cast<const char*>(&im), sizeof(double));
  }
  if (!f) throw std::runtime_error("save_state: write failed");
  std::ofstream mf(fs::path(dir) / "manifest.json");
  mf << manifest.dump(2) << "\n";
  if (!mf) throw std::runtime_error("save_state: manifest write failed");
}

PureState load_state(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream mf(fs::path(dir) / "manifest.json");
  if (!mf) throw std::runtime_error("load_state: missing manifest.json");
  nlohmann::json manifest = nlohmann::json::parse(mf);
  if (manifest.at("format_version").get<int>() != 1 ||
      manifest.at("kind").get<std::string>() != "dense")
    throw std::runtime_error("load_state: unsupported format");
  if (manifest.at("scalar").get<std::string>() != "complex128" ||
      manifest.at("endianness").get<std::string>() != "little")
    throw std::runtime_error("load_state: unsupported scalar encoding");
  const std::size_t L = manifest.at("L").get<std::size_t>();
  const std::size_t p = manifest.at("phys_dim").get<std::size_t>();
  std::size_t dim = 1;
  for (std::size_t i = 0; i < L; ++i) {
    dim *= p;
    if (dim > (1ull << 26)) throw std::runtime_error("load_state: over cap");
  }
  std::ifstream f(fs::path(dir) / manifest.at("file").get<std::string>(),
                  std::ios::binary);
  if (!f) throw std::runtime_error("load_state: missing state file");
  std::vector<cx> data(dim);
  for (cx& z : data) {
    double re = 0.0, im = 0.0;
    f.read(reinterpret_cast<char*>(&re), sizeof(double));
    f.read(reinterpret_cast<char*>(&im), sizeof(double));
    z = cx(static_cast<real_t>(re), static_cast<real_t>(im));
  }
  if (!f) throw std::runtime_error("load_state: short state file");
  std::vector<Index> idx;
  for (std::size_t i = 0; i < L; ++i)
    idx.push_back({"s" + std::to_string(i), p});
  PureState psi;
  psi.tensor = Tensor(std::move(idx), std::move(data));
  psi.num_sites = L;
  psi.phys_dim = p;
  return psi;
}

}  // namespace tnspec
