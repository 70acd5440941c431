#include "fieldgen/fieldnet/field_pair.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fieldgen::fieldnet {

using nlohmann::json;

FieldModelPair FieldModelPair::make(int dim, const std::vector<int>& hidden,
                                    Activation activation, int condition_dim,
                                    numkit::RngStream& rng) {
  FieldModelPair pair;
  pair.g_spec.input_dim = dim;
  pair.g_spec.hidden_sizes = hidden;
  pair.g_spec.output_dim = dim;
  pair.g_spec.activation = activation;
  pair.g_spec.output_head = OutputHead::Linear;
  pair.g_spec.condition_dim = condition_dim;

  pair.s_spec = pair.g_spec;
  pair.s_spec.output_dim = 1;
  pair.s_spec.output_head = OutputHead::Softplus;

  pair.g_params = init_params(pair.g_spec, rng);
  pair.s_params = init_params(pair.s_spec, rng);
  return pair;
}

namespace {

json spec_to_json(const MlpSpec& spec) {
  return json{{"input_dim", spec.input_dim},
              {"hidden_sizes", spec.hidden_sizes},
              {"output_dim", spec.output_dim},
              {"activation", to_string(spec.activation)},
              {"output_head", to_string(spec.output_head)},
              {"condition_dim", spec.condition_dim}};
}

MlpSpec spec_from_json(const json& j) {
  MlpSpec spec;
  spec.input_dim = j.at("input_dim").get<int>();
  spec.hidden_sizes = j.at("hidden_sizes").get<std::vector<int>>();
  spec.output_dim = j.at("output_dim").get<int>();
  spec.activation = parse_activation(j.at("activation").get<std::string>());
  spec.output_head = parse_output_head(j.at("output_head").get<std::string>());
  spec.condition_dim = j.at("condition_dim").get<int>();
  spec.validate();
  return spec;
}

}  // namespace

std::string checkpoint_to_string(const FieldModelPair& pair) {
  json j{{"format_version", kCheckpointFormatVersion},
         {"g", {{"spec", spec_to_json(pair.g_spec)}, {"params", pair.g_params}}},
         {"s", {{"spec", spec_to_json(pair.s_spec)}, {"params", pair.s_params}}}};
  return j.dump(2);
}

FieldModelPair checkpoint_from_string(const std::string& text) {
  json j = json::parse(text);
  const int version = j.at("format_version").get<int>();
  if (version != kCheckpointFormatVersion) {
    throw std::runtime_error("checkpoint format version " + std::to_string(version) +
                             " not supported (expected " +
                             std::to_string(kCheckpointFormatVersion) + ")");
  }
  FieldModelPair pair;
  pair.g_spec = spec_from_json(j.at("g").at("spec"));
  pair.g_params = j.at("g").at("params").get<Vec>();
  pair.s_spec = spec_from_json(j.at("s").at("spec"));
  pair.s_params = j.at("s").at("params").get<Vec>();
  if (static_cast<int>(pair.g_params.size()) != pair.g_spec.param_count() ||
      static_cast<int>(pair.s_params.size()) != pair.s_spec.param_count()) {
    throw std::runtime_error("checkpoint parameter count does not match spec");
  }
  return pair;
}

void save_checkpoint(const FieldModelPair& pair, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << checkpoint_to_string(pair) << "\n";
}

FieldModelPair load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_string(buf.str());
}

}  // namespace fieldgen::fieldnet
