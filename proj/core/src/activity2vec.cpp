#include "hake/a2v/activity2vec.hpp"

#include <algorithm>
#include <cmath>

#include "hake/rng.hpp"

namespace hake::a2v {

std::vector<double> part_state_embedding(const PartStateTriple& triple,
                                         const EmbeddingTable& table) {
  const std::vector<double>& part = table.lookup(to_string(triple.part));
  const std::vector<double>& verb = table.lookup(triple.verb);
  const std::vector<double>& object = table.lookup(triple.object);
  std::vector<double> out;
  out.reserve(part.size() + verb.size() + object.size());
  out.insert(out.end(), part.begin(), part.end());
  out.insert(out.end(), verb.begin(), verb.end());
  out.insert(out.end(), object.begin(), object.end());
  return out;
}

std::vector<double> attend_linguistic(const PartStateProbs& probs, const EmbeddingTable& table) {
  probs.validate();
  if (probs.parts.empty()) throw Error("attend_linguistic: no parts in evidence");
  const std::size_t d_lang = 3 * static_cast<std::size_t>(table.dim());
  std::vector<double> out(d_lang, 0.0);
  for (const auto& [part, entry] : probs.parts) {
    std::vector<double> part_vec(d_lang, 0.0);
    for (std::size_t s = 0; s < entry.states.size(); ++s) {
      const std::vector<double> e = part_state_embedding(entry.states[s], table);
      const double p = entry.probs[s];
      for (std::size_t i = 0; i < d_lang; ++i) part_vec[i] += p * e[i];
    }
    for (std::size_t i = 0; i < d_lang; ++i) out[i] += part_vec[i];
  }
  const double inv = 1.0 / static_cast<double>(probs.parts.size());
  for (double& v : out) v *= inv;
  return out;
}

std::vector<double> interactiveness_attention(
    const std::map<BodyPart, std::vector<double>>& visual,
    const std::map<BodyPart, double>& interactiveness) {
  if (visual.empty()) throw Error("interactiveness_attention: no part features");
  if (visual.size() != interactiveness.size())
    throw Error("interactiveness_attention: key sets differ");
  std::size_t dim = visual.begin()->second.size();
  std::vector<double> out(dim, 0.0);
  for (const auto& [part, feature] : visual) {
    auto w = interactiveness.find(part);
    if (w == interactiveness.end())
      throw Error("interactiveness_attention: missing weight for " + to_string(part));
    if (w->second < 0 || w->second > 1)
      throw Error("interactiveness_attention: weight outside [0,1] for " + to_string(part));
    if (feature.size() != dim)
      throw Error("interactiveness_attention: feature dimension mismatch for " + to_string(part));
    for (std::size_t i = 0; i < dim; ++i) out[i] += w->second * feature[i];
  }
  const double inv = 1.0 / static_cast<double>(visual.size());
  for (double& v : out) v *= inv;
  return out;
}

ActivityEmbedding fuse(const A2vConfig& config, const std::vector<double>& visual_attended,
                       const std::vector<double>& linguistic) {
  if (static_cast<int>(visual_attended.size()) != config.d_vis)
    throw Error("fuse: visual dimension " + std::to_string(visual_attended.size()) +
                " does not match configured " + std::to_string(config.d_vis));
  if (static_cast<int>(linguistic.size()) != config.d_lang())
    throw Error("fuse: linguistic dimension " + std::to_string(linguistic.size()) +
                " does not match configured " + std::to_string(config.d_lang()));
  ActivityEmbedding out;
  out.d_vis = config.d_vis;
  out.d_lang = config.d_lang();
  out.values.reserve(visual_attended.size() + linguistic.size());
  out.values.insert(out.values.end(), visual_attended.begin(), visual_attended.end());
  out.values.insert(out.values.end(), linguistic.begin(), linguistic.end());
  return out;
}

namespace {

std::vector<double> l2_normalized(const std::vector<double>& v) {
  double norm2 = 0;
  for (double x : v) norm2 += x * x;
  if (norm2 <= 0) return v;  // zero vector stays zero
  const double inv = 1.0 / std::sqrt(norm2);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * inv;
  return out;
}

}  // namespace

double alignment_triplet_loss(const std::vector<double>& anchor_visual,
                              const std::vector<double>& positive_linguistic,
                              const std::vector<double>& negative_linguistic, double margin) {
  if (anchor_visual.size() != positive_linguistic.size() ||
      anchor_visual.size() != negative_linguistic.size())
    throw Error("alignment_triplet_loss: dimension mismatch");
  if (margin < 0) throw Error("alignment_triplet_loss: margin must be >= 0");
  const std::vector<double> a = l2_normalized(anchor_visual);
  const std::vector<double> p = l2_normalized(positive_linguistic);
  const std::vector<double> n = l2_normalized(negative_linguistic);
  double dp = 0, dn = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dp += (a[i] - p[i]) * (a[i] - p[i]);
    dn += (a[i] - n[i]) * (a[i] - n[i]);
  }
  return std::max(0.0, dp - dn + margin);
}

std::vector<int> sample_alignment_negatives(
    const std::vector<std::set<ActivityLabel>>& batch_activities, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> out(batch_activities.size(), -1);
  for (std::size_t i = 0; i < batch_activities.size(); ++i) {
    std::vector<int> candidates;
    for (std::size_t j = 0; j < batch_activities.size(); ++j) {
      if (i == j) continue;
      bool disjoint = true;
      for (const auto& a : batch_activities[i])
        if (batch_activities[j].contains(a)) {
          disjoint = false;
          break;
        }
      if (disjoint) candidates.push_back(static_cast<int>(j));
    }
    if (!candidates.empty())
      out[i] = candidates[rng.below(candidates.size())];
  }
  return out;
}

}  // namespace hake::a2v
