#ifndef GAZEGRAPH_CHECKPOINT_HPP
#define GAZEGRAPH_CHECKPOINT_HPP

#include <string>
#include <utility>
#include <vector>

#include "gazegraph/tape.hpp"

namespace gazegraph {

/// Versioned text checkpoint: ordered meta key/value lines followed by named
/// parameter tensors. Floats are written with 17 significant digits, so a
/// write/read round trip is exact and identical runs produce identical bytes.
struct Checkpoint {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::pair<std::string, Tensor>> params;

  const std::string* find_meta(const std::string& key) const {
    for (const auto& [k, v] : meta)
      if (k == key) return &v;
    return nullptr;
  }
};

void write_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint read_checkpoint(const std::string& path);

/// Copies checkpoint tensors into an existing store. Every store parameter
/// must be present with a matching shape, and vice versa.
void load_into(const Checkpoint& ck, ParamStore& params);

Checkpoint snapshot(const ParamStore& params,
                    std::vector<std::pair<std::string, std::string>> meta);

std::string format_double(double x);  // shortest exact round-trip text

}  // namespace gazegraph

#endif  // GAZEGRAPH_CHECKPOINT_HPP
