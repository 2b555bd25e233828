#include "colp/colpnet.hpp"

#include "colp/io.hpp"

#include <json.hpp>

#include <fstream>

namespace colp {

using json = nlohmann::json;

namespace {

template <class T>
T require(const json& m, const char* key) {
  if (!m.contains(key)) throw error(std::string("model file: missing key '") + key + "'");
  try {
    return m.at(key).get<T>();
  } catch (const json::exception& e) {
    throw error(std::string("model file: bad value for '") + key + "': " + e.what());
  }
}

std::vector<real> to_list(const vec& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

void save_model(const colpnet& model, const std::filesystem::path& path) {
  json j;
  j["schema_version"] = model_schema_version;
  j["group"] = std::string(to_string(model.group().kind));
  j["num_particles"] = model.num_particles();
  j["width"] = model.width();
  j["delta_t"] = model.delta_t();
  // one-based (particle, component) pairs
  json sched = json::array();
  for (const auto& m : model.schedule().maps) sched.push_back({m.particle + 1, m.component + 1});
  j["schedule"] = sched;
  json nets = json::array();
  for (const auto& net : model.nets()) {
    json n;
    std::vector<real> hidden;
    for (Eigen::Index r = 0; r < net.width(); ++r)
      for (Eigen::Index c = 0; c < net.input_dim(); ++c) hidden.push_back(net.hidden(r, c));
    n["hidden"] = hidden;
    n["hidden_bias"] = to_list(net.hidden_bias);
    n["output_weights"] = to_list(net.output_weights);
    n["output_bias"] = net.output_bias;
    nets.push_back(n);
  }
  j["nets"] = nets;
  const auto& info = model.info;
  j["provenance"] = {{"topology", info.topology},
                     {"chi", info.chi},
                     {"dt", model.delta_t()},
                     {"num_particles", model.num_particles()},
                     {"data_seed", info.data_seed},
                     {"init_seed", info.init_seed},
                     {"epochs_trained", info.epochs_trained},
                     {"learning_rate", info.learning_rate},
                     {"final_loss", info.final_loss}};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_file_atomic(path, j.dump(2) + "\n");
}

colpnet load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw error("model file: cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw error("model file: malformed JSON: " + std::string(e.what()));
  }
  const int version = require<int>(j, "schema_version");
  if (version != model_schema_version)
    throw error("model file: unsupported schema_version " + std::to_string(version) + " (expected " +
                std::to_string(model_schema_version) + ")");

  const group_spec group = group_spec::of(parse_group(require<std::string>(j, "group")));
  const int num_particles = require<int>(j, "num_particles");
  const auto width = require<Eigen::Index>(j, "width");
  map_schedule schedule;
  schedule.delta_t = require<real>(j, "delta_t");
  for (const auto& entry : require<json>(j, "schedule")) {
    if (!entry.is_array() || entry.size() != 2) throw error("model file: schedule entries must be [particle, component]");
    const int particle = entry[0].get<int>() - 1;
    const int component = entry[1].get<int>() - 1;
    if (particle < 0 || particle >= num_particles || component < 0 || component >= group.dim)
      throw error("model file: schedule entry out of range");
    schedule.maps.push_back(map_descriptor::make(group, particle, component));
  }

  colpnet model(group, num_particles, std::move(schedule), width);
  const auto nets = require<json>(j, "nets");
  if (nets.size() != model.num_maps())
    throw error("model file: " + std::to_string(nets.size()) + " nets for " + std::to_string(model.num_maps()) +
                " maps");
  for (std::size_t k = 0; k < nets.size(); ++k) {
    auto& net = model.nets()[k];
    const auto hidden = require<std::vector<real>>(nets[k], "hidden");
    const auto hb = require<std::vector<real>>(nets[k], "hidden_bias");
    const auto ow = require<std::vector<real>>(nets[k], "output_weights");
    if (static_cast<Eigen::Index>(hidden.size()) != net.width() * net.input_dim() ||
        static_cast<Eigen::Index>(hb.size()) != net.width() || static_cast<Eigen::Index>(ow.size()) != net.width())
      throw error("model file: net " + std::to_string(k) + " has inconsistent weight shapes");
    std::size_t o = 0;
    for (Eigen::Index r = 0; r < net.width(); ++r)
      for (Eigen::Index c = 0; c < net.input_dim(); ++c) net.hidden(r, c) = hidden[o++];
    net.hidden_bias = Eigen::Map<const vec>(hb.data(), net.width());
    net.output_weights = Eigen::Map<const vec>(ow.data(), net.width());
    net.output_bias = require<real>(nets[k], "output_bias");
  }

  if (j.contains("provenance")) {
    const auto& p = j["provenance"];
    model.info.topology = p.value("topology", std::string("unknown"));
    model.info.chi = p.value("chi", 0.0);
    model.info.data_seed = p.value("data_seed", std::uint64_t{0});
    model.info.init_seed = p.value("init_seed", std::uint64_t{0});
    model.info.epochs_trained = p.value("epochs_trained", 0);
    model.info.learning_rate = p.value("learning_rate", 0.0);
    model.info.final_loss = p.value("final_loss", 0.0);
  }
  return model;
}

}  // namespace colp
