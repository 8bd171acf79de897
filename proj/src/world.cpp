#include "gazegraph/world.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gazegraph/checkpoint.hpp"
#include "gazegraph/rng.hpp"

namespace gazegraph {

namespace {

constexpr std::array<const char*, 12> kVerbNames = {
    "walk", "grab", "put", "open", "close", "sit",
    "standup", "switchon", "switchoff", "touch", "read", "type_on"};

const std::set<std::string> kContainers = {"fridge", "cabinet", "wardrobe", "toilet"};
const std::set<std::string> kDevices = {"tv", "computer", "lamp", "stove", "coffeemaker",
                                        "toaster"};
const std::set<std::string> kGrabbables = {"fork",  "knife",  "spoon",  "plate",  "glass",
                                           "mug",   "cereal", "milk",   "bread",  "kettle",
                                           "book",  "remote", "phone",  "pillow", "toothbrush",
                                           "towel"};
const std::set<std::string> kSittables = {"sofa", "chair", "bed"};
const std::set<std::string> kReadables = {"book", "phone"};
const std::set<std::string> kTypeables = {"keyboard", "phone", "computer"};

}  // namespace

const char* verb_name(Verb v) { return kVerbNames[static_cast<std::size_t>(v)]; }

Verb parse_verb(const std::string& name) {
  for (std::size_t i = 0; i < kVerbNames.size(); ++i)
    if (name == kVerbNames[i]) return static_cast<Verb>(i);
  throw std::invalid_argument("unknown verb: '" + name + "'");
}

std::string AtomicAction::to_string() const {
  std::string s = verb_name(verb);
  if (!object.empty()) s += " " + object;
  if (!object2.empty()) s += " " + object2;
  return s;
}

AtomicAction parse_action(const std::string& line) {
  std::istringstream in(line);
  std::string verb, a, b;
  if (!(in >> verb)) throw std::invalid_argument("empty action line");
  in >> a >> b;
  AtomicAction act;
  act.verb = parse_verb(verb);
  act.object = a;
  act.object2 = b;
  if (act.verb == Verb::put && b.empty())
    throw std::invalid_argument("put takes two objects: '" + line + "'");
  if (act.verb != Verb::put && !b.empty())
    throw std::invalid_argument("only put takes two objects: '" + line + "'");
  if (act.verb != Verb::standup && a.empty())
    throw std::invalid_argument("action needs an object: '" + line + "'");
  return act;
}

bool WorldState::marked(Verb v, const std::string& object) const {
  return marks.count(std::string(verb_name(v)) + " " + object) > 0;
}

bool is_container(const std::string& label) { return kContainers.count(label) > 0; }
bool is_device(const std::string& label) { return kDevices.count(label) > 0; }
bool is_grabbable(const std::string& label) { return kGrabbables.count(label) > 0; }
bool is_sittable(const std::string& label) { return kSittables.count(label) > 0; }
bool is_readable(const std::string& label) { return kReadables.count(label) > 0; }
bool is_typeable(const std::string& label) { return kTypeables.count(label) > 0; }

namespace {

bool held(const WorldState& s, const std::string& obj) {
  return s.holding.has_value() && *s.holding == obj;
}

bool co_located(const WorldState& s, const ObjectState& o) {
  return s.agent_room == o.room && s.agent_cell == o.cell;
}

/// Applies one action; returns an empty string on success, otherwise the
/// violated precondition.
std::string apply_action(WorldState& s, const AtomicAction& a) {
  auto obj_it = s.objects.find(a.object);
  if (a.verb != Verb::standup && obj_it == s.objects.end())
    return "precondition: no such object: " + a.object;

  switch (a.verb) {
    case Verb::walk: {
      if (s.sitting) return "precondition: cannot walk while sitting";
      if (held(s, a.object)) return "";  // already carrying it
      s.agent_room = obj_it->second.room;
      s.agent_cell = obj_it->second.cell;
      return "";
    }
    case Verb::grab: {
      ObjectState& o = obj_it->second;
      if (!is_grabbable(a.object)) return "precondition: cannot grab " + a.object;
      if (held(s, a.object)) return "precondition: already holding " + a.object;
      if (s.holding) return "precondition: hands full, holding " + *s.holding;
      if (!co_located(s, o)) return "precondition: not at " + a.object;
      if (o.container) {
        const ObjectState& c = s.objects.at(*o.container);
        if (!c.is_open) return "precondition: " + a.object + " is inside closed " + *o.container;
      }
      s.holding = a.object;
      o.container.reset();
      return "";
    }
    case Verb::put: {
      if (!held(s, a.object)) return "precondition: not holding " + a.object;
      auto tgt_it = s.objects.find(a.object2);
      if (tgt_it == s.objects.end()) return "precondition: no such object: " + a.object2;
      const ObjectState& t = tgt_it->second;
      if (!co_located(s, t)) return "precondition: not at " + a.object2;
      if (is_container(a.object2) && !t.is_open)
        return "precondition: cannot put into closed " + a.object2;
      ObjectState& o = obj_it->second;
      s.holding.reset();
      o.room = t.room;
      o.cell = t.cell;
      if (is_container(a.object2)) o.container = a.object2;
      return "";
    }
    case Verb::open_container: {
      ObjectState& o = obj_it->second;
      if (!is_container(a.object)) return "precondition: " + a.object + " is not a container";
      if (!co_located(s, o)) return "precondition: not at " + a.object;
      if (o.is_open) return "precondition: " + a.object + " already open";
      o.is_open = true;
      return "";
    }
    case Verb::close_container: {
      ObjectState& o = obj_it->second;
      if (!is_container(a.object)) return "precondition: " + a.object + " is not a container";
      if (!co_located(s, o)) return "precondition: not at " + a.object;
      if (!o.is_open) return "precondition: " + a.object + " already closed";
      o.is_open = false;
      return "";
    }
    case Verb::sit: {
      const ObjectState& o = obj_it->second;
      if (!is_sittable(a.object)) return "precondition: cannot sit on " + a.object;
      if (s.sitting) return "precondition: already sitting";
      if (!co_located(s, o)) return "precondition: not at " + a.object;
      s.sitting = true;
      return "";
    }
    case Verb::standup: {
      if (!s.sitting) return "precondition: not sitting";
      s.sitting = false;
      return "";
    }
    case Verb::switchon: {
      ObjectState& o = obj_it->second;
      if (!is_device(a.object)) return "precondition: " + a.object + " is not a device";
      if (!co_located(s, o)) return "precondition: not at " + a.object;
      if (o.is_on) return "precondition: " + a.object + " already on";
      o.is_on = true;
      return "";
    }
    case Verb::switchoff: {
      ObjectState& o = obj_it->second;
      if (!is_device(a.object)) return "precondition: " + a.object + " is not a device";
      if (!co_located(s, o)) return "precondition: not at " + a.object;
      if (!o.is_on) return "precondition: " + a.object + " already off";
      o.is_on = false;
      return "";
    }
    case Verb::touch: {
      const ObjectState& o = obj_it->second;
      if (!held(s, a.object)) {
        if (!co_located(s, o)) return "precondition: not at " + a.object;
        if (o.container && !s.objects.at(*o.container).is_open)
          return "precondition: " + a.object + " is inside closed " + *o.container;
      }
      s.marks.insert(std::string(verb_name(a.verb)) + " " + a.object);
      return "";
    }
    case Verb::read: {
      if (!is_readable(a.object)) return "precondition: cannot read " + a.object;
      if (!held(s, a.object)) return "precondition: must hold " + a.object + " to read";
      s.marks.insert(std::string(verb_name(a.verb)) + " " + a.object);
      return "";
    }
    case Verb::type_on: {
      const ObjectState& o = obj_it->second;
      if (!is_typeable(a.object)) return "precondition: cannot type on " + a.object;
      if (!held(s, a.object) && !co_located(s, o)) return "precondition: not at " + a.object;
      s.marks.insert(std::string(verb_name(a.verb)) + " " + a.object);
      return "";
    }
  }
  return "unreachable";
}

}  // namespace

ExecResult execute(const std::vector<AtomicAction>& program, const WorldState& initial) {
  ExecResult r;
  r.final_state = initial;
  for (std::size_t i = 0; i < program.size(); ++i) {
    const std::string err = apply_action(r.final_state, program[i]);
    if (!err.empty()) {
      r.success = false;
      r.failed_index = static_cast<std::ptrdiff_t>(i);
      r.reason = err + " (action: " + program[i].to_string() + ")";
      return r;
    }
  }
  r.success = true;
  return r;
}

std::string Condition::to_string() const {
  switch (kind) {
    case Kind::object_at: return "at(" + a + "," + b + ")";
    case Kind::container_closed: return "closed(" + a + ")";
    case Kind::container_open: return "open(" + a + ")";
    case Kind::device_on: return "on(" + a + ")";
    case Kind::device_off: return "off(" + a + ")";
    case Kind::marked: return "marked(" + std::string(verb_name(mark_verb)) + "," + a + ")";
    case Kind::agent_sitting: return "sitting";
  }
  return "?";
}

Condition parse_condition(const std::string& text) {
  Condition c;
  if (text == "sitting") {
    c.kind = Condition::Kind::agent_sitting;
    return c;
  }
  const auto lp = text.find('(');
  const auto rp = text.rfind(')');
  if (lp == std::string::npos || rp == std::string::npos || rp < lp)
    throw std::invalid_argument("malformed condition: '" + text + "'");
  const std::string head = text.substr(0, lp);
  std::string args = text.substr(lp + 1, rp - lp - 1);
  std::string first = args, second;
  if (const auto comma = args.find(','); comma != std::string::npos) {
    first = args.substr(0, comma);
    second = args.substr(comma + 1);
  }
  if (head == "at") {
    c.kind = Condition::Kind::object_at;
    c.a = first;
    c.b = second;
  } else if (head == "closed") {
    c.kind = Condition::Kind::container_closed;
    c.a = first;
  } else if (head == "open") {
    c.kind = Condition::Kind::container_open;
    c.a = first;
  } else if (head == "on") {
    c.kind = Condition::Kind::device_on;
    c.a = first;
  } else if (head == "off") {
    c.kind = Condition::Kind::device_off;
    c.a = first;
  } else if (head == "marked") {
    c.kind = Condition::Kind::marked;
    c.mark_verb = parse_verb(first);
    c.a = second;
  } else {
    throw std::invalid_argument("unknown condition kind: '" + head + "'");
  }
  return c;
}

bool goal_satisfied(const std::vector<Condition>& goal, const WorldState& state) {
  for (const Condition& c : goal) {
    switch (c.kind) {
      case Condition::Kind::object_at: {
        auto a = state.objects.find(c.a);
        auto b = state.objects.find(c.b);
        if (a == state.objects.end() || b == state.objects.end()) return false;
        if (held(state, c.a)) return false;
        if (is_container(c.b)) {
          if (!a->second.container || *a->second.container != c.b) return false;
        } else {
          if (a->second.container) return false;
          if (a->second.room != b->second.room || a->second.cell != b->second.cell) return false;
        }
        break;
      }
      case Condition::Kind::container_closed: {
        auto it = state.objects.find(c.a);
        if (it == state.objects.end() || it->second.is_open) return false;
        break;
      }
      case Condition::Kind::container_open: {
        auto it = state.objects.find(c.a);
        if (it == state.objects.end() || !it->second.is_open) return false;
        break;
      }
      case Condition::Kind::device_on: {
        auto it = state.objects.find(c.a);
        if (it == state.objects.end() || !it->second.is_on) return false;
        break;
      }
      case Condition::Kind::device_off: {
        auto it = state.objects.find(c.a);
        if (it == state.objects.end() || it->second.is_on) return false;
        break;
      }
      case Condition::Kind::marked:
        if (!state.marked(c.mark_verb, c.a)) return false;
        break;
      case Condition::Kind::agent_sitting:
        if (!state.sitting) return false;
        break;
    }
  }
  return true;
}

std::string goal_to_string(const std::vector<Condition>& goal) {
  std::string s;
  for (std::size_t i = 0; i < goal.size(); ++i) {
    if (i) s += " & ";
    s += goal[i].to_string();
  }
  return s;
}

std::vector<Condition> parse_goal(const std::string& text) {
  std::vector<Condition> goal;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto amp = text.find(" & ", pos);
    const std::string part =
        amp == std::string::npos ? text.substr(pos) : text.substr(pos, amp - pos);
    if (!part.empty()) goal.push_back(parse_condition(part));
    if (amp == std::string::npos) break;
    pos = amp + 3;
  }
  return goal;
}

// ---------------------------------------------------------------------------
// Activity templates
// ---------------------------------------------------------------------------

namespace {

struct TemplateBuild {
  std::vector<std::string> rooms;
  WorldState initial;
  std::vector<AtomicAction> main_program;
  std::vector<Condition> goal;
};

AtomicAction act(Verb v, std::string obj = "", std::string obj2 = "") {
  return AtomicAction{v, std::move(obj), std::move(obj2)};
}

Condition cond_at(std::string a, std::string b) {
  return {Condition::Kind::object_at, std::move(a), std::move(b), Verb::touch};
}
Condition cond_closed(std::string a) {
  return {Condition::Kind::container_closed, std::move(a), "", Verb::touch};
}
Condition cond_on(std::string a) { return {Condition::Kind::device_on, std::move(a), "", Verb::touch}; }
Condition cond_off(std::string a) { return {Condition::Kind::device_off, std::move(a), "", Verb::touch}; }
Condition cond_marked(Verb v, std::string a) {
  return {Condition::Kind::marked, std::move(a), "", v};
}
Condition cond_sitting() { return {Condition::Kind::agent_sitting, "", "", Verb::touch}; }

class WorldBuilder {
 public:
  WorldBuilder() {
    state_.agent_room = "";
    state_.agent_cell = -1;
  }

  void room(const std::string& name) {
    rooms_.push_back(name);
    if (name == "kitchen") {
      container("fridge", name, 0);
      container("cabinet", name, 1);
      obj("table", name, 2);
      obj("sink", name, 3);
      device("stove", name, 4);
      device("toaster", name, 5);
      device("coffeemaker", name, 6);
    } else if (name == "livingroom") {
      obj("sofa", name, 10);
      obj("bookshelf", name, 11);
      device("tv", name, 13);
      obj("desk", name, 14);
      obj("chair", name, 14);
      device("computer", name, 14);
      obj("keyboard", name, 14);
    } else if (name == "bedroom") {
      device("lamp", name, 20);
      obj("bed", name, 21);
      container("wardrobe", name, 22);
    } else if (name == "bathroom") {
      obj("sink", name, 30);
      obj("mirror", name, 31);
      container("toilet", name, 32);
    } else {
      throw std::logic_error("unknown room: " + name);
    }
    if (state_.agent_room.empty()) {
      state_.agent_room = name;
      state_.agent_cell = 99;  // doorway, co-located with nothing
    }
  }

  void obj(const std::string& label, const std::string& room, int cell) {
    if (state_.objects.count(label)) return;
    state_.objects[label] = ObjectState{room, cell, std::nullopt, false, false};
  }

  void device(const std::string& label, const std::string& room, int cell, bool on = false) {
    obj(label, room, cell);
    state_.objects[label].is_on = on;
  }

  void container(const std::string& label, const std::string& room, int cell,
                 bool open = false) {
    obj(label, room, cell);
    state_.objects[label].is_open = open;
  }

  void at(const std::string& label, const std::string& anchor) {
    const ObjectState& a = state_.objects.at(anchor);
    obj(label, a.room, a.cell);
  }

  void inside(const std::string& label, const std::string& container_label) {
    at(label, container_label);
    state_.objects[label].container = container_label;
  }

  void set_on(const std::string& label, bool on) { state_.objects.at(label).is_on = on; }

  TemplateBuild done(std::vector<AtomicAction> program, std::vector<Condition> goal) {
    TemplateBuild b;
    b.rooms = rooms_;
    b.initial = state_;
    b.main_program = std::move(program);
    b.goal = std::move(goal);
    return b;
  }

 private:
  WorldState state_;
  std::vector<std::string> rooms_;
};

using TemplateFn = TemplateBuild (*)(Rng&);

TemplateBuild tpl_put_cutlery_in_cabinet(Rng& rng) {
  static const std::array<const char*, 3> cutlery = {"fork", "knife", "spoon"};
  const std::string item = cutlery[rng.index(cutlery.size())];
  WorldBuilder w;
  w.room("kitchen");
  w.at(item, "table");
  return w.done(
      {act(Verb::walk, item), act(Verb::grab, item), act(Verb::walk, "cabinet"),
       act(Verb::open_container, "cabinet"), act(Verb::put, item, "cabinet"),
       act(Verb::close_container, "cabinet")},
      {cond_at(item, "cabinet"), cond_closed("cabinet")});
}

TemplateBuild tpl_put_milk_in_fridge(Rng&) {
  WorldBuilder w;
  w.room("kitchen");
  w.at("milk", "table");
  return w.done(
      {act(Verb::walk, "milk"), act(Verb::grab, "milk"), act(Verb::walk, "fridge"),
       act(Verb::open_container, "fridge"), act(Verb::put, "milk", "fridge"),
       act(Verb::close_container, "fridge")},
      {cond_at("milk", "fridge"), cond_closed("fridge")});
}

TemplateBuild tpl_make_cereal(Rng&) {
  WorldBuilder w;
  w.room("kitchen");
  w.inside("cereal", "cabinet");
  return w.done(
      {act(Verb::walk, "cabinet"), act(Verb::open_container, "cabinet"),
       act(Verb::grab, "cereal"), act(Verb::close_container, "cabinet"),
       act(Verb::walk, "table"), act(Verb::put, "cereal", "table")},
      {cond_at("cereal", "table"), cond_closed("cabinet")});
}

TemplateBuild tpl_make_toast(Rng&) {
  WorldBuilder w;
  w.room("kitchen");
  w.at("bread", "table");
  return w.done(
      {act(Verb::walk, "bread"), act(Verb::grab, "bread"), act(Verb::walk, "toaster"),
       act(Verb::put, "bread", "toaster"), act(Verb::switchon, "toaster")},
      {cond_at("bread", "toaster"), cond_on("toaster")});
}

TemplateBuild tpl_boil_water(Rng&) {
  WorldBuilder w;
  w.room("kitchen");
  w.at("kettle", "table");
  return w.done(
      {act(Verb::walk, "kettle"), act(Verb::grab, "kettle"), act(Verb::walk, "sink"),
       act(Verb::touch, "sink"), act(Verb::walk, "stove"), act(Verb::put, "kettle", "stove"),
       act(Verb::switchon, "stove")},
      {cond_at("kettle", "stove"), cond_on("stove")});
}

TemplateBuild tpl_make_coffee(Rng&) {
  WorldBuilder w;
  w.room("kitchen");
  w.inside("mug", "cabinet");
  return w.done(
      {act(Verb::walk, "cabinet"), act(Verb::open_container, "cabinet"), act(Verb::grab, "mug"),
       act(Verb::close_container, "cabinet"), act(Verb::walk, "coffeemaker"),
       act(Verb::put, "mug", "coffeemaker"), act(Verb::switchon, "coffeemaker")},
      {cond_at("mug", "coffeemaker"), cond_on("coffeemaker")});
}

TemplateBuild tpl_wash_plate(Rng&) {
  WorldBuilder w;
  w.room("kitchen");
  w.at("plate", "table");
  return w.done(
      {act(Verb::walk, "plate"), act(Verb::grab, "plate"), act(Verb::walk, "sink"),
       act(Verb::put, "plate", "sink"), act(Verb::touch, "plate"), act(Verb::grab, "plate"),
       act(Verb::walk, "cabinet"), act(Verb::open_container, "cabinet"),
       act(Verb::put, "plate", "cabinet"), act(Verb::close_container, "cabinet")},
      {cond_at("plate", "cabinet"), cond_closed("cabinet"), cond_marked(Verb::touch, "plate")});
}

TemplateBuild tpl_drink_water(Rng&) {
  WorldBuilder w;
  w.room("kitchen");
  w.room("livingroom");
  w.at("glass", "table");
  return w.done(
      {act(Verb::walk, "glass"), act(Verb::grab, "glass"), act(Verb::walk, "sink"),
       act(Verb::touch, "sink"), act(Verb::walk, "sofa"), act(Verb::sit, "sofa"),
       act(Verb::touch, "glass"), act(Verb::standup), act(Verb::walk, "sink"),
       act(Verb::put, "glass", "sink")},
      {cond_at("glass", "sink"), cond_marked(Verb::touch, "glass")});
}

TemplateBuild tpl_read_book(Rng&) {
  WorldBuilder w;
  w.room("livingroom");
  w.obj("table", "livingroom", 12);
  w.at("book", "bookshelf");
  return w.done(
      {act(Verb::walk, "book"), act(Verb::grab, "book"), act(Verb::walk, "sofa"),
       act(Verb::sit, "sofa"), act(Verb::read, "book"), act(Verb::standup),
       act(Verb::walk, "table"), act(Verb::put, "book", "table")},
      {cond_marked(Verb::read, "book"), cond_at("book", "table")});
}

TemplateBuild tpl_watch_tv(Rng&) {
  WorldBuilder w;
  w.room("livingroom");
  w.obj("table", "livingroom", 12);
  w.at("remote", "table");
  return w.done(
      {act(Verb::walk, "tv"), act(Verb::switchon, "tv"), act(Verb::walk, "remote"),
       act(Verb::grab, "remote"), act(Verb::walk, "sofa"), act(Verb::sit, "sofa"),
       act(Verb::touch, "remote")},
      {cond_on("tv"), cond_sitting(), cond_marked(Verb::touch, "remote")});
}

TemplateBuild tpl_work_on_computer(Rng&) {
  WorldBuilder w;
  w.room("livingroom");
  return w.done(
      {act(Verb::walk, "computer"), act(Verb::switchon, "computer"), act(Verb::sit, "chair"),
       act(Verb::type_on, "keyboard"), act(Verb::standup), act(Verb::switchoff, "computer")},
      {cond_marked(Verb::type_on, "keyboard"), cond_off("computer")});
}

TemplateBuild tpl_use_phone(Rng&) {
  WorldBuilder w;
  w.room("livingroom");
  w.obj("table", "livingroom", 12);
  w.at("phone", "table");
  return w.done(
      {act(Verb::walk, "phone"), act(Verb::grab, "phone"), act(Verb::walk, "sofa"),
       act(Verb::sit, "sofa"), act(Verb::type_on, "phone")},
      {cond_marked(Verb::type_on, "phone"), cond_sitting()});
}

TemplateBuild tpl_read_in_bed(Rng&) {
  WorldBuilder w;
  w.room("bedroom");
  w.at("book", "lamp");
  return w.done(
      {act(Verb::walk, "lamp"), act(Verb::switchon, "lamp"), act(Verb::grab, "book"),
       act(Verb::walk, "bed"), act(Verb::sit, "bed"), act(Verb::read, "book")},
      {cond_on("lamp"), cond_marked(Verb::read, "book"), cond_sitting()});
}

TemplateBuild tpl_go_to_sleep(Rng&) {
  WorldBuilder w;
  w.room("bedroom");
  w.set_on("lamp", true);
  w.inside("pillow", "wardrobe");
  return w.done(
      {act(Verb::walk, "wardrobe"), act(Verb::open_container, "wardrobe"),
       act(Verb::grab, "pillow"), act(Verb::close_container, "wardrobe"), act(Verb::walk, "bed"),
       act(Verb::put, "pillow", "bed"), act(Verb::walk, "lamp"), act(Verb::switchoff, "lamp"),
       act(Verb::walk, "bed"), act(Verb::sit, "bed")},
      {cond_at("pillow", "bed"), cond_off("lamp"), cond_sitting()});
}

TemplateBuild tpl_tidy_bed(Rng&) {
  WorldBuilder w;
  w.room("bedroom");
  w.obj("pillow", "bedroom", 23);  // fell on the floor
  return w.done(
      {act(Verb::walk, "pillow"), act(Verb::grab, "pillow"), act(Verb::walk, "bed"),
       act(Verb::put, "pillow", "bed"), act(Verb::touch, "bed")},
      {cond_at("pillow", "bed"), cond_marked(Verb::touch, "bed")});
}

TemplateBuild tpl_brush_teeth(Rng&) {
  WorldBuilder w;
  w.room("bathroom");
  w.at("toothbrush", "sink");
  return w.done(
      {act(Verb::walk, "toothbrush"), act(Verb::grab, "toothbrush"), act(Verb::touch, "sink"),
       act(Verb::touch, "toothbrush"), act(Verb::put, "toothbrush", "sink")},
      {cond_marked(Verb::touch, "toothbrush"), cond_at("toothbrush", "sink")});
}

TemplateBuild tpl_clean_toilet(Rng&) {
  WorldBuilder w;
  w.room("bathroom");
  w.at("towel", "sink");
  return w.done(
      {act(Verb::walk, "towel"), act(Verb::grab, "towel"), act(Verb::walk, "toilet"),
       act(Verb::open_container, "toilet"), act(Verb::touch, "toilet"),
       act(Verb::close_container, "toilet"), act(Verb::walk, "sink"),
       act(Verb::put, "towel", "sink")},
      {cond_marked(Verb::touch, "toilet"), cond_closed("toilet"), cond_at("towel", "sink")});
}

TemplateBuild tpl_wash_hands(Rng&) {
  WorldBuilder w;
  w.room("bathroom");
  w.at("towel", "sink");
  return w.done(
      {act(Verb::walk, "sink"), act(Verb::touch, "sink"), act(Verb::grab, "towel"),
       act(Verb::touch, "towel"), act(Verb::walk, "mirror"), act(Verb::touch, "mirror"),
       act(Verb::walk, "sink"), act(Verb::put, "towel", "sink")},
      {cond_marked(Verb::touch, "sink"), cond_marked(Verb::touch, "towel"),
       cond_marked(Verb::touch, "mirror"), cond_at("towel", "sink")});
}

struct TemplateDef {
  const char* name;
  TemplateFn build;
};

constexpr std::array<TemplateDef, 18> kTemplates = {{
    {"put_cutlery_in_cabinet", tpl_put_cutlery_in_cabinet},
    {"put_milk_in_fridge", tpl_put_milk_in_fridge},
    {"make_cereal", tpl_make_cereal},
    {"make_toast", tpl_make_toast},
    {"boil_water", tpl_boil_water},
    {"make_coffee", tpl_make_coffee},
    {"wash_plate", tpl_wash_plate},
    {"drink_water", tpl_drink_water},
    {"read_book", tpl_read_book},
    {"watch_tv", tpl_watch_tv},
    {"work_on_computer", tpl_work_on_computer},
    {"use_phone", tpl_use_phone},
    {"read_in_bed", tpl_read_in_bed},
    {"go_to_sleep", tpl_go_to_sleep},
    {"tidy_bed", tpl_tidy_bed},
    {"brush_teeth", tpl_brush_teeth},
    {"clean_toilet", tpl_clean_toilet},
    {"wash_hands", tpl_wash_hands},
}};

}  // namespace

std::size_t activity_template_count() { return kTemplates.size(); }

const std::string& activity_template_name(std::size_t index) {
  static std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& t : kTemplates) v.emplace_back(t.name);
    return v;
  }();
  return names.at(index);
}

// ---------------------------------------------------------------------------
// Video synthesis
// ---------------------------------------------------------------------------

namespace {

struct SizeClass {
  double w, h;
};

SizeClass box_size(const std::string& label, Rng& rng) {
  static const std::set<std::string> large = {"fridge", "table", "sofa",   "bed",
                                              "wardrobe", "desk", "bookshelf"};
  if (large.count(label)) return {rng.uniform(230.0, 330.0), rng.uniform(200.0, 300.0)};
  if (is_grabbable(label) || label == "keyboard")
    return {rng.uniform(55.0, 95.0), rng.uniform(45.0, 80.0)};
  return {rng.uniform(130.0, 210.0), rng.uniform(120.0, 190.0)};
}

double clampx(double x, const ScreenGeometry& g) { return std::clamp(x, 0.0, g.width_px - 1.0); }
double clampy(double y, const ScreenGeometry& g) { return std::clamp(y, 0.0, g.height_px - 1.0); }

/// Screen-space layout of all placed objects for one (activity, camera)
/// pair. Objects sharing a logical cell cluster around the cell's anchor.
std::vector<SyntheticVideo::Box> build_layout(const WorldState& initial,
                                              const ScreenGeometry& geom, Rng& rng) {
  // anchor per logical (room, cell)
  std::map<std::pair<std::string, int>, std::pair<double, double>> anchors;
  std::vector<std::pair<double, double>> taken;
  for (const auto& [label, o] : initial.objects) {
    const auto key = std::make_pair(o.room, o.cell);
    if (anchors.count(key)) continue;
    double ax = 0.0, ay = 0.0;
    for (int attempt = 0; attempt < 32; ++attempt) {
      ax = rng.uniform(0.10, 0.90) * geom.width_px;
      ay = rng.uniform(0.30, 0.85) * geom.height_px;
      bool ok = true;
      for (const auto& [tx, ty] : taken) {
        const double dx = ax - tx, dy = ay - ty;
        if (dx * dx + dy * dy < 220.0 * 220.0) ok = false;
      }
      if (ok) break;
    }
    anchors[key] = {ax, ay};
    taken.emplace_back(ax, ay);
  }

  std::vector<SyntheticVideo::Box> boxes;
  for (const auto& [label, o] : initial.objects) {
    const auto [ax, ay] = anchors.at({o.room, o.cell});
    const SizeClass sz = box_size(label, rng);
    SyntheticVideo::Box b;
    b.label = label;
    b.w = sz.w;
    b.h = sz.h;
    b.cx = clampx(ax + rng.uniform(-60.0, 60.0), geom);
    b.cy = clampy(ay + rng.uniform(-50.0, 50.0), geom);
    boxes.push_back(b);
  }
  // draw order: big surfaces at the back, small objects in front
  std::stable_sort(boxes.begin(), boxes.end(), [](const auto& a, const auto& b) {
    return a.w * a.h > b.w * b.h;
  });
  return boxes;
}

}  // namespace

std::string SyntheticVideo::label_at(std::size_t frame, double x, double y) const {
  if (frame >= frame_count()) throw std::out_of_range("label_at: frame out of range");
  const auto& h = held[frame];
  if (h) {
    const Box hb{*h, agent_x[frame] + 30.0, agent_y[frame] - 25.0, 55.0, 50.0};
    if (hb.contains(x, y)) return *h;
  }
  const Box agent{"character", agent_x[frame], agent_y[frame], 70.0, 170.0};
  if (agent.contains(x, y)) return "character";

  std::set<std::string> displaced;
  if (h) displaced.insert(*h);
  for (auto it = moved[frame].rbegin(); it != moved[frame].rend(); ++it) {
    displaced.insert(it->first);
  }
  // moved objects draw in front of everything static
  for (auto it = moved[frame].rbegin(); it != moved[frame].rend(); ++it) {
    if (h && it->first == *h) continue;
    for (const Box& b : static_boxes) {
      if (b.label != it->first) continue;
      const Box nb{b.label, it->second.first, it->second.second, b.w, b.h};
      if (nb.contains(x, y)) return nb.label;
      break;
    }
  }
  for (auto it = static_boxes.rbegin(); it != static_boxes.rend(); ++it) {
    if (displaced.count(it->label)) continue;
    if (it->contains(x, y)) return it->label;
  }
  return y < wall_fraction * geom.height_px ? "wall" : "floor";
}

std::vector<std::string> SyntheticVideo::labels_in_frame(std::size_t frame) const {
  if (frame >= frame_count()) throw std::out_of_range("labels_in_frame: frame out of range");
  std::set<std::string> seen = {"wall", "floor", "character"};
  for (const Box& b : static_boxes) seen.insert(b.label);
  return {seen.begin(), seen.end()};
}

std::pair<double, double> SyntheticVideo::agent_center(std::size_t frame) const {
  if (frame >= frame_count()) throw std::out_of_range("agent_center: frame out of range");
  return {agent_x[frame], agent_y[frame]};
}

std::size_t SyntheticVideo::action_index_at(std::size_t frame) const {
  for (std::size_t i = 0; i < action_intervals.size(); ++i)
    if (frame >= action_intervals[i].first && frame < action_intervals[i].second) return i;
  return action_intervals.size() - 1;
}

std::size_t SyntheticVideo::viewed_action_count(std::size_t frames_seen) const {
  std::size_t n = 0;
  for (const auto& [start, end] : action_intervals)
    if (end <= frames_seen) ++n;
  return n;
}

namespace {

/// Object's current screen center at a frame, honoring held/moved state.
std::pair<double, double> object_center(const SyntheticVideo& v, std::size_t frame,
                                        const std::string& label) {
  if (v.held[frame] && *v.held[frame] == label)
    return {v.agent_x[frame] + 30.0, v.agent_y[frame] - 25.0};
  for (auto it = v.moved[frame].rbegin(); it != v.moved[frame].rend(); ++it)
    if (it->first == label) return it->second;
  for (const auto& b : v.static_boxes)
    if (b.label == label) return {b.cx, b.cy};
  return {v.agent_x[frame], v.agent_y[frame]};
}

const std::string* fixation_object(const AtomicAction& a) {
  switch (a.verb) {
    case Verb::put: return &a.object2;
    case Verb::standup: return nullptr;
    default: return &a.object;
  }
}

std::vector<AtomicAction> with_padding(const std::vector<AtomicAction>& main_program,
                                       const WorldState& initial,
                                       const std::vector<Condition>& goal,
                                       const DatasetConfig& cfg, Rng& rng) {
  std::set<std::string> excluded;
  for (const Condition& c : goal) {
    if (!c.a.empty()) excluded.insert(c.a);
    if (!c.b.empty()) excluded.insert(c.b);
  }
  std::vector<std::string> wander;
  for (const auto& [label, o] : initial.objects) {
    if (excluded.count(label) || o.container) continue;
    wander.push_back(label);
  }

  auto target = static_cast<std::size_t>(std::clamp(
      std::llround(rng.gaussian(cfg.target_actions, 2.0)),
      static_cast<long long>(cfg.min_actions), static_cast<long long>(cfg.max_actions)));

  std::vector<AtomicAction> program = main_program;
  while (!wander.empty() && program.size() + 2 <= target) {
    std::vector<std::size_t> slots;
    for (std::size_t i = 0; i < program.size(); ++i)
      if (program[i].verb == Verb::walk) slots.push_back(i);
    if (slots.empty()) break;
    const std::size_t slot = slots[rng.index(slots.size())];
    const std::string& target_obj = wander[rng.index(wander.size())];
    program.insert(program.begin() + static_cast<std::ptrdiff_t>(slot),
                   {act(Verb::walk, target_obj), act(Verb::touch, target_obj)});
  }
  return program;
}

std::shared_ptr<SyntheticVideo> synthesize_video(std::size_t template_idx, std::size_t camera,
                                                 std::uint64_t video_seed,
                                                 std::uint64_t layout_seed,
                                                 const DatasetConfig& cfg) {
  Rng rng(video_seed);
  TemplateBuild tb = kTemplates[template_idx].build(rng);
  const std::vector<AtomicAction> program =
      with_padding(tb.main_program, tb.initial, tb.goal, cfg, rng);

  {  // generator invariants: gold succeeds, gold minus final action fails
    const ExecResult full = execute(program, tb.initial);
    if (!full.success || !goal_satisfied(tb.goal, full.final_state))
      throw std::logic_error("template '" + std::string(kTemplates[template_idx].name) +
                             "' produced a failing program: " + full.reason);
    std::vector<AtomicAction> truncated(program.begin(), program.end() - 1);
    const ExecResult partial = execute(truncated, tb.initial);
    if (partial.success && goal_satisfied(tb.goal, partial.final_state))
      throw std::logic_error("template '" + std::string(kTemplates[template_idx].name) +
                             "' goal holds without its final action");
  }

  auto video = std::make_shared<SyntheticVideo>();
  video->activity_name = kTemplates[template_idx].name;
  video->activity_index = template_idx;
  video->camera = camera;
  video->video_seed = video_seed;
  video->rooms = tb.rooms;
  video->program = program;
  video->goal = tb.goal;
  video->initial_state = tb.initial;
  video->fps = cfg.fps;
  video->geom = cfg.geometry;

  Rng layout_rng(layout_seed);
  video->static_boxes = build_layout(tb.initial, cfg.geometry, layout_rng);
  video->wall_fraction = layout_rng.uniform(0.32, 0.45);

  // action timing
  std::size_t t = 0;
  for (std::size_t i = 0; i < program.size(); ++i) {
    const std::size_t dur = static_cast<std::size_t>(rng.range(
        static_cast<std::int64_t>(cfg.min_action_frames),
        static_cast<std::int64_t>(cfg.max_action_frames)));
    video->action_intervals.emplace_back(t, t + dur);
    t += dur;
  }
  const std::size_t frames = t;

  auto box_center = [&](const std::string& label) -> std::pair<double, double> {
    for (const auto& b : video->static_boxes)
      if (b.label == label) return {b.cx, b.cy};
    throw std::logic_error("no box for object: " + label);
  };

  // frame-by-frame agent path and object state; action effects land on the
  // final frame of each interval
  video->agent_x.assign(frames, 0.0);
  video->agent_y.assign(frames, 0.0);
  video->held.assign(frames, std::nullopt);
  video->moved.assign(frames, {});

  double ax = rng.uniform(0.12, 0.30) * cfg.geometry.width_px;
  double ay = rng.uniform(0.55, 0.80) * cfg.geometry.height_px;
  std::optional<std::string> holding;
  std::vector<std::pair<std::string, std::pair<double, double>>> moved_now;

  auto current_center = [&](const std::string& label) -> std::pair<double, double> {
    if (holding && *holding == label) return {ax + 30.0, ay - 25.0};
    for (auto it = moved_now.rbegin(); it != moved_now.rend(); ++it)
      if (it->first == label) return it->second;
    return box_center(label);
  };

  for (std::size_t i = 0; i < program.size(); ++i) {
    const auto [start, end] = video->action_intervals[i];
    const AtomicAction& a = program[i];
    const double sx = ax, sy = ay;
    std::pair<double, double> walk_target{ax, ay};
    if (a.verb == Verb::walk) {
      const auto [ox, oy] = current_center(a.object);
      walk_target = {clampx(ox - 55.0, cfg.geometry), clampy(oy + 40.0, cfg.geometry)};
    }
    for (std::size_t f = start; f < end; ++f) {
      if (a.verb == Verb::walk) {
        const double u = static_cast<double>(f - start + 1) / static_cast<double>(end - start);
        ax = sx + (walk_target.first - sx) * u;
        ay = sy + (walk_target.second - sy) * u;
      }
      video->agent_x[f] = ax;
      video->agent_y[f] = ay;
      video->held[f] = holding;
      video->moved[f] = moved_now;
    }
    // effect
    switch (a.verb) {
      case Verb::grab:
        holding = a.object;
        break;
      case Verb::put: {
        const auto [tx, ty] = current_center(a.object2);
        moved_now.emplace_back(a.object,
                               std::make_pair(clampx(tx + rng.uniform(-45.0, 45.0), cfg.geometry),
                                              clampy(ty - 25.0, cfg.geometry)));
        holding.reset();
        break;
      }
      default:
        break;
    }
    if (end > start) {
      video->held[end - 1] = holding;
      video->moved[end - 1] = moved_now;
    }
  }

  // ground-truth scanpath: fixate the current action's object, saccade to
  // the next action's object near the end of each interval, occasionally
  // glance at a distractor
  video->scanpath.x.assign(frames, 0.0);
  video->scanpath.y.assign(frames, 0.0);
  for (std::size_t i = 0; i < program.size(); ++i) {
    const auto [start, end] = video->action_intervals[i];
    for (std::size_t f = start; f < end; ++f) {
      const bool anticipate =
          i + 1 < program.size() &&
          static_cast<double>(f - start) >=
              (1.0 - cfg.anticipation_fraction) * static_cast<double>(end - start);
      const AtomicAction& focus_action = anticipate ? program[i + 1] : program[i];
      std::pair<double, double> target{video->agent_x[f], video->agent_y[f]};
      if (const std::string* obj = fixation_object(focus_action))
        target = object_center(*video, f, *obj);
      if (rng.chance(cfg.distractor_prob) && !video->static_boxes.empty()) {
        const auto& b = video->static_boxes[rng.index(video->static_boxes.size())];
        target = {b.cx, b.cy};
      }
      video->scanpath.x[f] = clampx(target.first + rng.gaussian(0.0, cfg.jitter_px), cfg.geometry);
      video->scanpath.y[f] = clampy(target.second + rng.gaussian(0.0, cfg.jitter_px), cfg.geometry);
    }
  }
  return video;
}

}  // namespace

std::size_t Dataset::token_of(const AtomicAction& a) const {
  const auto it = std::lower_bound(action_vocab.begin(), action_vocab.end(), a);
  if (it == action_vocab.end() || !(*it == a))
    throw std::out_of_range("action not in the dataset token table: " + a.to_string());
  return static_cast<std::size_t>(it - action_vocab.begin());
}

Dataset generate_dataset(const DatasetConfig& config, std::uint64_t seed) {
  if (config.activity_count == 0 || config.activity_count > kTemplates.size())
    throw std::invalid_argument("activity_count must be in [1, " +
                                std::to_string(kTemplates.size()) + "]");
  if (config.cameras_per_activity < 2)
    throw std::invalid_argument(
        "cameras_per_activity must be >= 2 to split train/test by (activity, camera) pairs");
  if (config.videos_per_pair < 1)
    throw std::invalid_argument("videos_per_pair must be >= 1");

  Dataset ds;
  ds.config = config;
  ds.seed = seed;

  std::size_t test_cams = static_cast<std::size_t>(
      std::llround(config.test_pair_fraction * static_cast<double>(config.cameras_per_activity)));
  test_cams = std::clamp<std::size_t>(test_cams, 1, config.cameras_per_activity - 1);

  std::size_t index = 0;
  for (std::size_t a = 0; a < config.activity_count; ++a) {
    ds.activity_names.emplace_back(kTemplates[a].name);
    std::vector<std::size_t> cams(config.cameras_per_activity);
    for (std::size_t c = 0; c < cams.size(); ++c) cams[c] = c;
    Rng split_rng(seed_for(seed, "split", a));
    split_rng.shuffle(cams);

    for (std::size_t ci = 0; ci < cams.size(); ++ci) {
      const std::size_t camera = cams[ci];
      const bool is_test = ci < test_cams;
      for (std::size_t k = 0; k < config.videos_per_pair; ++k) {
        const std::uint64_t vseed = seed_for(seed, "video", index);
        const std::uint64_t lseed = seed_for(seed, "layout", a * 1000 + camera);
        auto video = synthesize_video(a, camera, vseed, lseed, config);
        video->id = std::string(kTemplates[a].name) + "-c" + std::to_string(camera) + "-v" +
                    std::to_string(k);
        if (is_test)
          ds.test_indices.push_back(ds.videos.size());
        else
          ds.train_indices.push_back(ds.videos.size());
        ds.videos.push_back(std::move(video));
        ++index;
      }
    }
  }

  std::set<AtomicAction> actions;
  for (const auto& v : ds.videos) actions.insert(v->program.begin(), v->program.end());
  ds.action_vocab.assign(actions.begin(), actions.end());
  return ds;
}

double success_rate(const std::vector<SuccessCase>& cases) {
  if (cases.empty()) return 0.0;
  std::size_t ok = 0;
  for (const SuccessCase& c : cases) {
    std::vector<AtomicAction> program = c.viewed;
    program.insert(program.end(), c.predicted.begin(), c.predicted.end());
    const ExecResult r = execute(program, c.video->initial_state);
    if (r.success && goal_satisfied(c.video->goal, r.final_state)) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(cases.size());
}

void write_program(const std::string& path, const SyntheticVideo& video) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open program file for writing: " + path);
  out << "# gazegraph-program v1\n";
  out << "# activity " << video.activity_name << "\n";
  out << "# camera " << video.camera << "\n";
  std::string rooms;
  for (std::size_t i = 0; i < video.rooms.size(); ++i) {
    if (i) rooms += ",";
    rooms += video.rooms[i];
  }
  out << "# rooms " << rooms << "\n";
  out << "# goal " << goal_to_string(video.goal) << "\n";
  for (const AtomicAction& a : video.program) out << a.to_string() << "\n";
}

ProgramFile read_program(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open program file: " + path);
  ProgramFile pf;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      hs >> key;
      if (key == "activity") hs >> pf.activity;
      else if (key == "camera") hs >> pf.camera;
      else if (key == "rooms") {
        std::string rooms;
        hs >> rooms;
        std::size_t pos = 0;
        while (pos < rooms.size()) {
          auto comma = rooms.find(',', pos);
          pf.rooms.push_back(rooms.substr(pos, comma == std::string::npos ? comma : comma - pos));
          if (comma == std::string::npos) break;
          pos = comma + 1;
        }
      } else if (key == "goal") {
        std::string rest;
        std::getline(hs, rest);
        if (!rest.empty() && rest[0] == ' ') rest.erase(0, 1);
        pf.goal = parse_goal(rest);
      }
      continue;
    }
    pf.actions.push_back(parse_action(line));
  }
  return pf;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

void write_manifest(const std::string& dir, const Dataset& dataset) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "programs");
  std::ofstream out(fs::path(dir) / "manifest.txt");
  if (!out) throw std::runtime_error("cannot open manifest for writing in " + dir);
  const DatasetConfig& c = dataset.config;
  out << "gazegraph-dataset v1\n";
  out << "seed " << dataset.seed << "\n";
  out << "cfg activity_count " << c.activity_count << "\n";
  out << "cfg cameras_per_activity " << c.cameras_per_activity << "\n";
  out << "cfg videos_per_pair " << c.videos_per_pair << "\n";
  out << "cfg test_pair_fraction " << format_double(c.test_pair_fraction) << "\n";
  out << "cfg fps " << format_double(c.fps) << "\n";
  out << "cfg min_actions " << c.min_actions << "\n";
  out << "cfg max_actions " << c.max_actions << "\n";
  out << "cfg target_actions " << format_double(c.target_actions) << "\n";
  out << "cfg jitter_px " << format_double(c.jitter_px) << "\n";
  out << "cfg distractor_prob " << format_double(c.distractor_prob) << "\n";
  out << "cfg anticipation_fraction " << format_double(c.anticipation_fraction) << "\n";
  out << "cfg min_action_frames " << c.min_action_frames << "\n";
  out << "cfg max_action_frames " << c.max_action_frames << "\n";
  out << "cfg screen_width_px " << format_double(c.geometry.width_px) << "\n";
  out << "cfg screen_height_px " << format_double(c.geometry.height_px) << "\n";
  out << "cfg physical_width_mm " << format_double(c.geometry.physical_width_mm) << "\n";
  out << "cfg viewing_distance_mm " << format_double(c.geometry.viewing_distance_mm) << "\n";
  out << "activities " << dataset.activity_names.size() << "\n";
  for (std::size_t i = 0; i < dataset.activity_names.size(); ++i)
    out << "activity " << i << " " << dataset.activity_names[i] << "\n";
  out << "actions " << dataset.action_vocab.size() << "\n";
  for (const AtomicAction& a : dataset.action_vocab)
    out << "action " << verb_name(a.verb) << " " << a.object << " "
        << (a.object2.empty() ? "-" : a.object2) << "\n";
  out << "videos " << dataset.videos.size() << "\n";
  for (std::size_t i = 0; i < dataset.videos.size(); ++i) {
    const SyntheticVideo& v = *dataset.videos[i];
    const bool is_test = std::find(dataset.test_indices.begin(), dataset.test_indices.end(), i) !=
                         dataset.test_indices.end();
    out << "video " << v.id << " " << v.activity_index << " " << v.camera << " " << v.video_seed
        << " " << v.frame_count() << " " << (is_test ? "test" : "train") << " programs/" << v.id
        << ".txt\n";
    write_program((fs::path(dir) / "programs" / (v.id + ".txt")).string(), v);
  }
  out << "end\n";
}

Dataset load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  const std::string path = (fs::path(dir) / "manifest.txt").string();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset manifest: " + path);
  std::string magic, version, tag;
  in >> magic >> version;
  if (magic != "gazegraph-dataset" || version != "v1")
    throw std::runtime_error("bad dataset manifest header in " + path);

  std::uint64_t seed = 0;
  in >> tag >> seed;
  if (tag != "seed") throw std::runtime_error("manifest: expected seed");

  DatasetConfig c;
  while (in >> tag && tag == "cfg") {
    std::string key;
    in >> key;
    if (key == "activity_count") in >> c.activity_count;
    else if (key == "cameras_per_activity") in >> c.cameras_per_activity;
    else if (key == "videos_per_pair") in >> c.videos_per_pair;
    else if (key == "test_pair_fraction") in >> c.test_pair_fraction;
    else if (key == "fps") in >> c.fps;
    else if (key == "min_actions") in >> c.min_actions;
    else if (key == "max_actions") in >> c.max_actions;
    else if (key == "target_actions") in >> c.target_actions;
    else if (key == "jitter_px") in >> c.jitter_px;
    else if (key == "distractor_prob") in >> c.distractor_prob;
    else if (key == "anticipation_fraction") in >> c.anticipation_fraction;
    else if (key == "min_action_frames") in >> c.min_action_frames;
    else if (key == "max_action_frames") in >> c.max_action_frames;
    else if (key == "screen_width_px") in >> c.geometry.width_px;
    else if (key == "screen_height_px") in >> c.geometry.height_px;
    else if (key == "physical_width_mm") in >> c.geometry.physical_width_mm;
    else if (key == "viewing_distance_mm") in >> c.geometry.viewing_distance_mm;
    else throw std::runtime_error("manifest: unknown cfg key '" + key + "'");
  }

  // the corpus is regenerated from config + seed, then verified against the
  // manifest so stale manifests fail loudly instead of silently drifting
  Dataset ds = generate_dataset(c, seed);

  if (tag != "activities") throw std::runtime_error("manifest: expected activities");
  std::size_t n = 0;
  in >> n;
  if (n != ds.activity_names.size()) throw std::runtime_error("manifest: activity count drifted");
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t idx = 0;
    std::string name;
    in >> tag >> idx >> name;
    if (tag != "activity" || idx != i || name != ds.activity_names[i])
      throw std::runtime_error("manifest: activity table drifted at index " + std::to_string(i));
  }
  in >> tag >> n;
  if (tag != "actions") throw std::runtime_error("manifest: expected actions");
  if (n != ds.action_vocab.size()) throw std::runtime_error("manifest: action table drifted");
  for (std::size_t i = 0; i < n; ++i) {
    std::string verb, a, b;
    in >> tag >> verb >> a >> b;
    if (tag != "action") throw std::runtime_error("manifest: bad action entry");
    const AtomicAction& expect = ds.action_vocab[i];
    if (verb != verb_name(expect.verb) || a != expect.object ||
        (b == "-" ? "" : b) != expect.object2)
      throw std::runtime_error("manifest: action table drifted at index " + std::to_string(i));
  }
  in >> tag >> n;
  if (tag != "videos") throw std::runtime_error("manifest: expected videos");
  if (n != ds.videos.size()) throw std::runtime_error("manifest: video count drifted");
  for (std::size_t i = 0; i < n; ++i) {
    std::string id, split, program;
    std::size_t tpl = 0, camera = 0, frames = 0;
    std::uint64_t vseed = 0;
    in >> tag >> id >> tpl >> camera >> vseed >> frames >> split >> program;
    if (tag != "video") throw std::runtime_error("manifest: bad video entry");
    const SyntheticVideo& v = *ds.videos[i];
    const bool is_test = std::find(ds.test_indices.begin(), ds.test_indices.end(), i) !=
                         ds.test_indices.end();
    if (id != v.id || tpl != v.activity_index || camera != v.camera || vseed != v.video_seed ||
        frames != v.frame_count() || split != (is_test ? "test" : "train"))
      throw std::runtime_error("manifest: video entry drifted for " + id);
  }
  in >> tag;
  if (tag != "end") throw std::runtime_error("manifest: missing end marker");
  return ds;
}

}  // namespace gazegraph
