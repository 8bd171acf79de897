#ifndef GAZEGRAPH_WORLD_HPP
#define GAZEGRAPH_WORLD_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gazegraph/encoders.hpp"
#include "gazegraph/gaze.hpp"

namespace gazegraph {

enum class Verb {
  walk,
  grab,
  put,
  open_container,
  close_container,
  sit,
  standup,
  switchon,
  switchoff,
  touch,
  read,
  type_on,
};

const char* verb_name(Verb v);
Verb parse_verb(const std::string& name);  // vocabulary error on unknown

/// "verb + object" program step; put carries a second object (the target).
struct AtomicAction {
  Verb verb = Verb::walk;
  std::string object;
  std::string object2;  // put only

  std::string to_string() const;
  bool operator==(const AtomicAction&) const = default;
  bool operator<(const AtomicAction& o) const {
    return std::tie(verb, object, object2) < std::tie(o.verb, o.object, o.object2);
  }
};

AtomicAction parse_action(const std::string& line);

struct ObjectState {
  std::string room;
  int cell = 0;                          // logical position for co-location
  std::optional<std::string> container;  // inside which container, if any
  bool is_open = false;
  bool is_on = false;
};

/// Symbolic household state: everything the precondition/effect rules and
/// the goal predicates can see.
struct WorldState {
  std::string agent_room;
  int agent_cell = 0;
  std::optional<std::string> holding;
  bool sitting = false;
  std::map<std::string, ObjectState> objects;
  std::set<std::string> marks;  // "verb object" facts for experiential actions

  bool marked(Verb v, const std::string& object) const;
};

// Object-class categories driving the precondition rules.
bool is_container(const std::string& label);
bool is_device(const std::string& label);
bool is_grabbable(const std::string& label);
bool is_sittable(const std::string& label);
bool is_readable(const std::string& label);
bool is_typeable(const std::string& label);

struct ExecResult {
  bool success = false;
  std::ptrdiff_t failed_index = -1;  // first violated action, -1 on success
  std::string reason;
  WorldState final_state;
};

/// Applies precondition/effect rules sequentially; the first violated
/// precondition aborts with its index and reason.
ExecResult execute(const std::vector<AtomicAction>& program, const WorldState& initial);

/// Goal predicate: conjunction of conditions on the final state.
struct Condition {
  enum class Kind {
    object_at,         // object a is located at/in object b
    container_closed,  // a
    container_open,    // a
    device_on,         // a
    device_off,        // a
    marked,            // mark_verb applied to a
    agent_sitting,
  };
  Kind kind = Kind::object_at;
  std::string a;
  std::string b;
  Verb mark_verb = Verb::touch;

  std::string to_string() const;
};

Condition parse_condition(const std::string& text);
bool goal_satisfied(const std::vector<Condition>& goal, const WorldState& state);
std::string goal_to_string(const std::vector<Condition>& goal);
std::vector<Condition> parse_goal(const std::string& text);

/// One generated video: program, timing, ground-truth scanpath, and the
/// screen-space scene used to answer "which object is under this pixel".
class SyntheticVideo : public SceneOracle {
 public:
  struct Box {
    std::string label;
    double cx = 0.0, cy = 0.0;  // center, pixels
    double w = 0.0, h = 0.0;
    bool contains(double x, double y) const {
      return x >= cx - w / 2 && x <= cx + w / 2 && y >= cy - h / 2 && y <= cy + h / 2;
    }
  };

  std::string id;
  std::string activity_name;
  std::size_t activity_index = 0;
  std::size_t camera = 0;
  std::uint64_t video_seed = 0;
  std::vector<std::string> rooms;
  std::vector<AtomicAction> program;
  std::vector<Condition> goal;
  WorldState initial_state;
  double fps = 10.0;
  std::vector<std::pair<std::size_t, std::size_t>> action_intervals;  // [start, end) frames
  FrameFixationTrack scanpath;  // ground truth, one point per frame
  std::vector<Box> static_boxes;  // draw order: earlier = further back
  std::vector<double> agent_x, agent_y;
  std::vector<std::optional<std::string>> held;          // per frame
  std::vector<std::vector<std::pair<std::string, std::pair<double, double>>>> moved;  // per frame
  double wall_fraction = 0.4;  // top of the screen is wall, rest is floor
  ScreenGeometry geom;

  // SceneOracle
  const std::string& video_id() const override { return id; }
  std::size_t frame_count() const override { return agent_x.size(); }
  const ScreenGeometry& geometry() const override { return geom; }
  std::string label_at(std::size_t frame, double x, double y) const override;
  std::vector<std::string> labels_in_frame(std::size_t frame) const override;
  std::pair<double, double> agent_center(std::size_t frame) const override;

  std::size_t action_index_at(std::size_t frame) const;
  /// Actions whose interval ends at or before the cutoff frame count.
  std::size_t viewed_action_count(std::size_t frames_seen) const;
};

struct DatasetConfig {
  std::size_t activity_count = 18;  // first N templates
  std::size_t cameras_per_activity = 4;
  std::size_t videos_per_pair = 2;
  double test_pair_fraction = 0.25;
  double fps = 10.0;
  std::size_t min_actions = 9;
  std::size_t max_actions = 21;
  double target_actions = 15.0;  // paper-scale average program length
  double jitter_px = 20.0;
  double distractor_prob = 0.1;
  double anticipation_fraction = 0.2;
  std::size_t min_action_frames = 3;
  std::size_t max_action_frames = 7;
  ScreenGeometry geometry;
};

struct Dataset {
  DatasetConfig config;
  std::uint64_t seed = 0;
  std::vector<std::string> activity_names;            // index = activity class
  std::vector<AtomicAction> action_vocab;             // token table, EOS excluded
  std::vector<std::shared_ptr<SyntheticVideo>> videos;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;

  std::size_t token_of(const AtomicAction& a) const;  // contract error if absent
  std::size_t eos_token() const { return action_vocab.size(); }
  std::size_t action_classes_with_eos() const { return action_vocab.size() + 1; }
};

std::size_t activity_template_count();
const std::string& activity_template_name(std::size_t index);

/// Generates the synthetic corpus: disjoint (activity, camera) pairs across
/// splits, seeded scanpaths with jitter, anticipatory saccades and
/// distractor fixations, and programs that execute to a satisfied goal.
Dataset generate_dataset(const DatasetConfig& config, std::uint64_t seed);

/// Prefix + predicted-suffix execution check against the sample's goal.
struct SuccessCase {
  const SyntheticVideo* video = nullptr;
  std::vector<AtomicAction> viewed;
  std::vector<AtomicAction> predicted;
};
double success_rate(const std::vector<SuccessCase>& cases);

// Program file: "# key value" header lines, then one action per line.
void write_program(const std::string& path, const SyntheticVideo& video);
struct ProgramFile {
  std::string activity;
  std::size_t camera = 0;
  std::vector<Condition> goal;
  std::vector<std::string> rooms;
  std::vector<AtomicAction> actions;
};
ProgramFile read_program(const std::string& path);

// Dataset manifest: enough to regenerate and verify the corpus.
void write_manifest(const std::string& dir, const Dataset& dataset);
Dataset load_dataset(const std::string& dir);

}  // namespace gazegraph

#endif  // GAZEGRAPH_WORLD_HPP
