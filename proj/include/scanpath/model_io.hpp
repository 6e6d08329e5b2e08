#pragma once

#include <scanpath/model.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace scanpath {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kModelFormatName = "scanpath-model";

namespace detail {

using nlohmann::json;

inline json vec_to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Vec vec_from_json(const json& a, int dim, const char* what) {
  if (!a.is_array() || static_cast<int>(a.size()) != dim)
    throw ParseError(std::string("model file: '") + what + "' must be an array of " + std::to_string(dim) +
                     " numbers");
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = a.at(i).get<double>();
  return v;
}

inline json config_to_json(const BuildConfig& c) {
  json j;
  j["max_level"] = c.max_level;
  j["num_clusters"] = c.num_clusters;
  j["dyn_cluster"] = c.dyn_cluster;
  j["rule"] = std::string(to_string(c.rule));
  j["merge_radius"] = c.merge_radius ? json(*c.merge_radius) : json(nullptr);
  j["pca_variance"] = c.pca_variance;
  j["time_weight"] = c.time_weight;
  j["use_time"] = c.use_time;
  j["seed"] = c.seed;
  j["kmeans_restarts"] = c.kmeans_restarts;
  return j;
}

inline BuildConfig config_from_json(const json& j) {
  BuildConfig c;
  c.max_level = j.at("max_level").get<int>();
  c.num_clusters = j.at("num_clusters").get<std::size_t>();
  c.dyn_cluster = j.at("dyn_cluster").get<bool>();
  c.rule = parse_update_rule(j.at("rule").get<std::string>());
  if (!j.at("merge_radius").is_null()) c.merge_radius = j.at("merge_radius").get<double>();
  c.pca_variance = j.at("pca_variance").get<double>();
  c.time_weight = j.at("time_weight").get<double>();
  c.use_time = j.at("use_time").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.kmeans_restarts = j.at("kmeans_restarts").get<int>();
  return c;
}

}  // namespace detail

inline nlohmann::json model_to_json(const ScanPathModel& m) {
  using nlohmann::json;
  json doc;
  doc["format"] = kModelFormatName;
  doc["version"] = kModelFormatVersion;
  doc["dim"] = m.dim;
  doc["max_level"] = m.max_level;
  doc["build_config"] = detail::config_to_json(m.build_config);
  json levels = json::array();
  for (const auto& level : m.levels) {
    json nodes = json::array();
    for (const auto& n : level) {
      json shape;
      shape["mean_shift"] = detail::vec_to_json(n.shape.mean_shift);
      json comps = json::array();
      for (int r = 0; r < n.shape.rank(); ++r) comps.push_back(detail::vec_to_json(n.shape.components.row(r).transpose()));
      shape["components"] = comps;
      shape["variances"] = n.shape.variances;
      nodes.push_back({{"level", n.level},
                       {"mean_shift", detail::vec_to_json(n.mean_shift)},
                       {"support", n.support},
                       {"shape", shape}});
    }
    levels.push_back(nodes);
  }
  doc["levels"] = levels;
  return doc;
}

inline ScanPathModel model_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw ParseError("model file: top level must be an object");
    if (doc.value("format", std::string{}) != kModelFormatName)
      throw ParseError(std::string("model file: missing format tag '") + kModelFormatName + "'");
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw VersionError("model file version " + std::to_string(version) + " is not supported (expected version " +
                         std::to_string(kModelFormatVersion) + ")");
    ScanPathModel m;
    m.dim = doc.at("dim").get<int>();
    if (m.dim != 2 && m.dim != 3) throw ParseError("model file: dim must be 2 or 3");
    m.max_level = doc.at("max_level").get<int>();
    m.build_config = detail::config_from_json(doc.at("build_config"));
    const auto& levels = doc.at("levels");
    if (!levels.is_array() || levels.empty()) throw ParseError("model file: 'levels' must be a non-empty array");
    for (std::size_t l = 0; l < levels.size(); ++l) {
      std::vector<ModelNode> nodes;
      for (const auto& jn : levels[l]) {
        ModelNode n;
        n.level = jn.at("level").get<int>();
        if (n.level != static_cast<int>(l) + 1)
          throw ParseError("model file: node at index " + std::to_string(l + 1) + " claims level " +
                           std::to_string(n.level));
        n.mean_shift = detail::vec_from_json(jn.at("mean_shift"), m.dim, "mean_shift");
        n.support = jn.at("support").get<std::size_t>();
        const auto& js = jn.at("shape");
        n.shape.dim = m.dim;
        n.shape.mean_shift = detail::vec_from_json(js.at("mean_shift"), m.dim, "shape.mean_shift");
        const auto& comps = js.at("components");
        n.shape.variances = js.at("variances").get<std::vector<double>>();
        if (comps.size() != n.shape.variances.size() || static_cast<int>(comps.size()) > m.dim)
          throw ParseError("model file: components and variances disagree in length");
        n.shape.components.resize(static_cast<Eigen::Index>(comps.size()), m.dim);
        for (std::size_t r = 0; r < comps.size(); ++r)
          n.shape.components.row(static_cast<Eigen::Index>(r)) =
              detail::vec_from_json(comps[r], m.dim, "components").transpose();
        nodes.push_back(std::move(n));
      }
      m.levels.push_back(std::move(nodes));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
}

inline void save_model(const ScanPathModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model '" + path + "'");
  out << model_to_json(m).dump(1) << '\n';
  if (!out) throw Error("write failed for model '" + path + "'");
}

inline ScanPathModel read_model(std::istream& in, const std::string& source = "<stream>") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source + ": " + e.what());
  }
  return model_from_json(doc);
}

inline ScanPathModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model '" + path + "'");
  return read_model(in, path);
}

}  // namespace scanpath
