#include "serialize.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "common.hpp"

namespace gpsmc {

nlohmann::json samples_to_json(const WeightedSamples& ws,
                               const std::vector<std::string>& coordinate_names,
                               std::int64_t eval_count) {
  ws.validate();
  nlohmann::json j;
  j["artifact"] = "weighted_samples";
  j["coordinates"] = coordinate_names;
  j["dim"] = ws.thetas.front().size();
  j["count"] = ws.size();
  j["likelihood_evals"] = eval_count;
  nlohmann::json thetas = nlohmann::json::array();
  for (const auto& t : ws.thetas) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index d = 0; d < t.size(); ++d) row.push_back(t[d]);
    thetas.push_back(std::move(row));
  }
  j["thetas"] = std::move(thetas);
  nlohmann::json weights = nlohmann::json::array();
  for (Eigen::Index i = 0; i < ws.weights.size(); ++i) weights.push_back(ws.weights[i]);
  j["weights"] = std::move(weights);
  return j;
}

WeightedSamples samples_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("artifact", "") != "weighted_samples")
    throw ConfigError("not a weighted-samples document");
  WeightedSamples ws;
  const auto& thetas = j.at("thetas");
  const auto& weights = j.at("weights");
  if (!thetas.is_array() || !weights.is_array() || thetas.size() != weights.size())
    throw ConfigError("weighted-samples document: thetas/weights mismatch");
  ws.thetas.reserve(thetas.size());
  for (const auto& row : thetas) {
    Eigen::VectorXd t(row.size());
    for (std::size_t d = 0; d < row.size(); ++d) t[static_cast<Eigen::Index>(d)] = row[d];
    ws.thetas.push_back(std::move(t));
  }
  ws.weights.resize(static_cast<Eigen::Index>(weights.size()));
  for (std::size_t i = 0; i < weights.size(); ++i)
    ws.weights[static_cast<Eigen::Index>(i)] = weights[i];
  ws.validate();
  return ws;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(const std::string& text) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}

std::string canonical_dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace gpsmc
