#pragma once

#include <map>
#include <vector>

#include "hake/knowledge.hpp"

namespace hake {

/// Multi-label part-state evidence: per body part, probabilities over that
/// part's state vocabulary plus a part-level interactiveness weight.
/// Entries are probabilities in [0,1]; rows need not sum to 1.
struct PartStateProbs {
  struct PartEntry {
    std::vector<PartStateTriple> states;
    std::vector<double> probs;
    double interactiveness = 1.0;
  };
  std::map<BodyPart, PartEntry> parts;

  void validate() const {
    for (const auto& [part, entry] : parts) {
      if (entry.states.size() != entry.probs.size())
        throw DataError("part state probs: state/probability length mismatch for " +
                        to_string(part));
      for (double p : entry.probs)
        if (p < 0 || p > 1) throw DataError("part state probs: probability outside [0,1]");
      if (entry.interactiveness < 0 || entry.interactiveness > 1)
        throw DataError("part state probs: interactiveness outside [0,1]");
      for (const auto& s : entry.states)
        if (s.part != part)
          throw DataError("part state probs: state " + s.token() + " listed under " +
                          to_string(part));
    }
  }
};

}  // namespace hake
