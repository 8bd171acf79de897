#include "gazegraph/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gazegraph {

namespace {
constexpr const char* kMagic = "gazegraph-checkpoint";
constexpr int kVersion = 1;
}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out << kMagic << " v" << kVersion << "\n";
  out << "meta " << ck.meta.size() << "\n";
  for (const auto& [k, v] : ck.meta) out << k << " " << v << "\n";
  out << "params " << ck.params.size() << "\n";
  for (const auto& [name, t] : ck.params) {
    out << "param " << name << " " << t.rank();
    for (std::size_t d : t.shape) out << " " << d;
    out << "\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) out << " ";
      out << format_double(t.data[i]);
    }
    out << "\n";
  }
  out << "end\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string magic, version;
  in >> magic >> version;
  if (magic != kMagic || version != "v1")
    throw std::runtime_error("bad checkpoint header in " + path + ": '" + magic + " " + version +
                             "'");
  Checkpoint ck;
  std::string tag;
  std::size_t n = 0;
  in >> tag >> n;
  if (tag != "meta") throw std::runtime_error("checkpoint: expected meta section");
  in.ignore();
  for (std::size_t i = 0; i < n; ++i) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("checkpoint: truncated meta");
    auto sp = line.find(' ');
    if (sp == std::string::npos)
      ck.meta.emplace_back(line, "");
    else
      ck.meta.emplace_back(line.substr(0, sp), line.substr(sp + 1));
  }
  in >> tag >> n;
  if (tag != "params") throw std::runtime_error("checkpoint: expected params section");
  for (std::size_t i = 0; i < n; ++i) {
    std::string name;
    std::size_t rank = 0;
    in >> tag >> name >> rank;
    if (tag != "param") throw std::runtime_error("checkpoint: expected param entry");
    std::vector<std::size_t> shape(rank);
    std::size_t total = 1;
    for (std::size_t d = 0; d < rank; ++d) {
      in >> shape[d];
      total *= shape[d];
    }
    Tensor t(shape);
    for (std::size_t j = 0; j < total; ++j) in >> t.data[j];
    if (!in) throw std::runtime_error("checkpoint: truncated tensor data for " + name);
    ck.params.emplace_back(name, std::move(t));
  }
  in >> tag;
  if (tag != "end") throw std::runtime_error("checkpoint: missing end marker");
  return ck;
}

void load_into(const Checkpoint& ck, ParamStore& params) {
  std::size_t matched = 0;
  for (const auto& [name, t] : ck.params) {
    if (!params.contains(name))
      throw std::runtime_error("checkpoint parameter '" + name + "' not present in model");
    Param& p = params.at(name);
    if (p.value.shape != t.shape)
      throw std::runtime_error("checkpoint parameter '" + name + "' shape " + t.shape_str() +
                               " does not match model shape " + p.value.shape_str());
    p.value = t;
    ++matched;
  }
  if (matched != params.count()) {
    for (Param& p : params) {
      bool found = false;
      for (const auto& [name, t] : ck.params)
        if (name == p.name) found = true;
      if (!found) throw std::runtime_error("model parameter '" + p.name + "' missing from checkpoint");
    }
  }
}

Checkpoint snapshot(const ParamStore& params,
                    std::vector<std::pair<std::string, std::string>> meta) {
  Checkpoint ck;
  ck.meta = std::move(meta);
  for (const Param& p : params) ck.params.emplace_back(p.name, p.value);
  return ck;
}

}  // namespace gazegraph
