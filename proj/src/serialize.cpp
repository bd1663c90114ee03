#include "reluforge/serialize.hpp"

#include <fstream>

namespace reluforge {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json network_to_json(const ReluNetwork& net) {
  ordered_json doc;
  doc["input_dim"] = static_cast<std::int64_t>(net.input_dim());
  ordered_json layers = ordered_json::array();
  for (const Layer& layer : net.layers()) {
    ordered_json jl;
    jl["rows"] = static_cast<std::int64_t>(layer.rows());
    jl["cols"] = static_cast<std::int64_t>(layer.cols());
    Matrix dense = to_dense(layer.weights);
    std::vector<double> flat;
    flat.reserve(static_cast<size_t>(dense.size()));
    for (Eigen::Index i = 0; i < dense.rows(); ++i)
      for (Eigen::Index j = 0; j < dense.cols(); ++j) flat.push_back(dense(i, j));
    jl["weights"] = flat;
    jl["bias"] = std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size());
    jl["activation"] = layer.activation == Activation::relu ? "relu" : "linear";
    layers.push_back(std::move(jl));
  }
  doc["layers"] = std::move(layers);
  return doc;
}

ReluNetwork network_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("input_dim") || !doc.contains("layers"))
    throw ParseError("network document must carry input_dim and layers");
  const auto input_dim = doc.at("input_dim").get<std::int64_t>();
  if (input_dim <= 0) throw ParseError("input_dim must be positive");
  const auto& jlayers = doc.at("layers");
  if (!jlayers.is_array() || jlayers.empty())
    throw ParseError("layers must be a nonempty array");

  std::vector<Layer> layers;
  std::int64_t expected_cols = input_dim;
  for (size_t l = 0; l < jlayers.size(); ++l) {
    const auto& jl = jlayers[l];
    const auto rows = jl.at("rows").get<std::int64_t>();
    const auto cols = jl.at("cols").get<std::int64_t>();
    if (rows <= 0 || cols <= 0) throw ParseError("layer dimensions must be positive");
    if (cols != expected_cols)
      throw ParseError("dimension mismatch at layer " + std::to_string(l) +
                       ": cols " + std::to_string(cols) + ", expected " +
                       std::to_string(expected_cols));
    const auto weights = jl.at("weights").get<std::vector<double>>();
    const auto bias = jl.at("bias").get<std::vector<double>>();
    if (static_cast<std::int64_t>(weights.size()) != rows * cols)
      throw ParseError("weight count mismatch at layer " + std::to_string(l));
    if (static_cast<std::int64_t>(bias.size()) != rows)
      throw ParseError("bias length != rows at layer " + std::to_string(l));
    const std::string act = jl.at("activation").get<std::string>();
    if (act != "relu" && act != "linear")
      throw ParseError("unknown activation '" + act + "' at layer " + std::to_string(l));

    Matrix W(rows, cols);
    for (std::int64_t i = 0; i < rows; ++i)
      for (std::int64_t j = 0; j < cols; ++j) W(i, j) = weights[static_cast<size_t>(i * cols + j)];
    Vector b = Eigen::Map<const Vector>(bias.data(), rows);
    layers.emplace_back(W, std::move(b),
                        act == "relu" ? Activation::relu : Activation::linear);
    expected_cols = rows;
  }
  ReluNetwork net(std::move(layers));
  auto violations = validate(net);
  if (!violations.empty()) throw ParseError("document violates network invariants: " + violations.front());
  return net;
}

std::string serialize(const ReluNetwork& net) { return network_to_json(net).dump(); }

ReluNetwork deserialize(const std::string& bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed document: ") + e.what());
  }
  return network_from_json(doc);
}

void write_network(const std::string& path, const ReluNetwork& net) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << network_to_json(net).dump(2) << "\n";
}

ReluNetwork read_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed document: ") + e.what());
  }
  return network_from_json(doc);
}

}  // namespace reluforge
