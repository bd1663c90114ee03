#ifndef RELUFORGE_SERIALIZE_HPP
#define RELUFORGE_SERIALIZE_HPP

#include <stdexcept>
#include <string>

#include "reluforge/net.hpp"

#include <json.hpp>

namespace reluforge {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Network document format:
///   {"input_dim": int,
///    "layers": [{"rows": int, "cols": int,
///                "weights": [row-major floats], "bias": [floats],
///                "activation": "relu"|"linear"}]}
/// Floats survive a round trip bit-exactly.
nlohmann::ordered_json network_to_json(const ReluNetwork& net);
ReluNetwork network_from_json(const nlohmann::json& doc);

std::string serialize(const ReluNetwork& net);
ReluNetwork deserialize(const std::string& bytes);

void write_network(const std::string& path, const ReluNetwork& net);
ReluNetwork read_network(const std::string& path);

}  // namespace reluforge

#endif
