#include "gazegraph/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include "gazegraph/checkpoint.hpp"
#include "gazegraph/rng.hpp"

namespace gazegraph {

namespace {

struct Field {
  const char* name;
  void (*set)(RunConfig&, const std::string&);
  std::string (*get)(const RunConfig&);
};

template <auto Member>
void set_member(RunConfig& c, const std::string& value) {
  using T = std::decay_t<decltype(c.*Member)>;
  if constexpr (std::is_same_v<T, std::string>) {
    c.*Member = value;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (value == "1" || value == "true" || value == "on")
      c.*Member = true;
    else if (value == "0" || value == "false" || value == "off")
      c.*Member = false;
    else
      throw std::invalid_argument("bad boolean config value: '" + value + "'");
  } else if constexpr (std::is_same_v<T, double>) {
    c.*Member = std::stod(value);
  } else {
    c.*Member = static_cast<T>(std::stoull(value));
  }
}

template <auto Member>
std::string get_member(const RunConfig& c) {
  using T = std::decay_t<decltype(c.*Member)>;
  if constexpr (std::is_same_v<T, std::string>) {
    return c.*Member;
  } else if constexpr (std::is_same_v<T, bool>) {
    return (c.*Member) ? "1" : "0";
  } else if constexpr (std::is_same_v<T, double>) {
    return format_double(c.*Member);
  } else {
    return std::to_string(c.*Member);
  }
}

#define GG_FIELD(member) \
  Field { #member, &set_member<&RunConfig::member>, &get_member<&RunConfig::member> }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      GG_FIELD(seed),
      GG_FIELD(activities),
      GG_FIELD(cameras),
      GG_FIELD(videos_per_pair),
      GG_FIELD(test_fraction),
      GG_FIELD(fps),
      GG_FIELD(min_actions),
      GG_FIELD(max_actions),
      GG_FIELD(target_actions),
      GG_FIELD(jitter_px),
      GG_FIELD(distractor_prob),
      GG_FIELD(anticipation_fraction),
      GG_FIELD(min_action_frames),
      GG_FIELD(max_action_frames),
      GG_FIELD(screen_width_px),
      GG_FIELD(screen_height_px),
      GG_FIELD(physical_width_mm),
      GG_FIELD(viewing_distance_mm),
      GG_FIELD(velocity_threshold),
      GG_FIELD(min_fixation_ms),
      GG_FIELD(crop_size),
      GG_FIELD(merge_threshold),
      GG_FIELD(node_dim),
      GG_FIELD(label_dim),
      GG_FIELD(alpha),
      GG_FIELD(beta),
      GG_FIELD(gamma),
      GG_FIELD(grid_cols),
      GG_FIELD(grid_rows),
      GG_FIELD(detector_accuracy),
      GG_FIELD(ecc_layers),
      GG_FIELD(ecc_hidden),
      GG_FIELD(mlp_hidden),
      GG_FIELD(lstm_hidden),
      GG_FIELD(lstm_layers),
      GG_FIELD(max_decode_len),
      GG_FIELD(autoregressive),
      GG_FIELD(learning_rate),
      GG_FIELD(epochs),
      GG_FIELD(input_fraction),
      GG_FIELD(variant),
      GG_FIELD(histogram_bins),
      GG_FIELD(sweep_sizes),
  };
  return f;
}

#undef GG_FIELD

void set_field(RunConfig& c, const Field& f, const std::string& value) {
  try {
    f.set(c, value);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("bad value for config key '" + std::string(f.name) + "': '" +
                                value + "'");
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("bad value for config key '" + std::string(f.name) + "': '" +
                                value + "'");
  }
}

std::string get_field(const RunConfig& c, const Field& f) { return f.get(c); }

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

DatasetConfig RunConfig::dataset_config() const {
  DatasetConfig d;
  d.activity_count = activities;
  d.cameras_per_activity = cameras;
  d.videos_per_pair = videos_per_pair;
  d.test_pair_fraction = test_fraction;
  d.fps = fps;
  d.min_actions = min_actions;
  d.max_actions = max_actions;
  d.target_actions = target_actions;
  d.jitter_px = jitter_px;
  d.distractor_prob = distractor_prob;
  d.anticipation_fraction = anticipation_fraction;
  d.min_action_frames = min_action_frames;
  d.max_action_frames = max_action_frames;
  d.geometry = geometry();
  return d;
}

ScreenGeometry RunConfig::geometry() const {
  return {screen_width_px, screen_height_px, physical_width_mm, viewing_distance_mm};
}

PipelineConfig RunConfig::pipeline_config() const {
  PipelineConfig p;
  p.crop_half_size = crop_size;
  p.merge_threshold = merge_threshold;
  p.encoder.node_dim = node_dim;
  p.encoder.label_dim = label_dim;
  p.encoder.alpha = alpha;
  p.encoder.beta = beta;
  p.encoder.gamma = gamma;
  p.encoder.grid_cols = grid_cols;
  p.encoder.grid_rows = grid_rows;
  p.encoder.detector_accuracy = detector_accuracy;
  p.encoder.encoder_seed = seed_for(seed, "encoders");
  p.encoder.detector_seed = seed_for(seed, "detector");
  p.model.node_dim = node_dim;
  p.model.edge_dim = 2 * label_dim;
  p.model.ecc_layers = ecc_layers;
  p.model.ecc_hidden = ecc_hidden;
  p.model.mlp_hidden = mlp_hidden;
  p.model.lstm_hidden = lstm_hidden;
  p.model.lstm_layers = lstm_layers;
  p.model.max_decode_len = max_decode_len;
  p.model.autoregressive = autoregressive;
  p.model.learning_rate = learning_rate;
  p.model.epochs = epochs;
  p.input_fraction = input_fraction;
  p.histogram_bins = histogram_bins;
  return p;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected 'key = value', got '" + text + "'");
    apply_override(base, trim(text.substr(0, eq)) + "=" + trim(text.substr(eq + 1)));
  }
  return base;
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("expected key=value, got '" + assignment + "'");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  for (const Field& f : fields()) {
    if (key == f.name) {
      set_field(config, f, value);
      return;
    }
  }
  throw std::invalid_argument("unknown config key: '" + key + "'");
}

void apply_env_overrides(RunConfig& config) {
  for (const Field& f : fields()) {
    std::string env_name = "GAZEGRAPH_";
    for (const char* p = f.name; *p; ++p)
      env_name += static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
    if (const char* v = std::getenv(env_name.c_str())) set_field(config, f, v);
  }
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Field& f : fields()) out.emplace_back(f.name, get_field(config, f));
  return out;
}

std::vector<double> parse_size_list(const std::string& text) {
  std::vector<double> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    sizes.push_back(std::stod(t));
  }
  if (sizes.empty()) throw std::invalid_argument("empty size list: '" + text + "'");
  return sizes;
}

std::uint64_t file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash missing file: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

void write_run_manifest(const std::string& path, const std::string& command,
                        const RunConfig& config,
                        const std::vector<std::string>& artifact_paths) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open run manifest for writing: " + path);
  out << "gazegraph-run v1\n";
  out << "command " << command << "\n";
  for (const auto& [k, v] : config_entries(config)) out << "config " << k << " = " << v << "\n";
  for (const std::string& artifact : artifact_paths) {
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(file_hash(artifact)));
    out << "artifact " << std::filesystem::path(artifact).filename().string() << " " << hex
        << "\n";
  }
  out << "end\n";
}

}  // namespace gazegraph
