#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "hake/a2v/embedding_table.hpp"
#include "hake/knowledge.hpp"
#include "hake/part_state_probs.hpp"

namespace hake::a2v {

struct A2vConfig {
  int d_tok = 768;   // per-token language dimension
  int d_vis = 1280;  // attended visual dimension
  int d_lang() const { return 3 * d_tok; }
  int d_total() const { return d_vis + d_lang(); }
};

/// Concatenated visual + linguistic activity embedding (d_vis + d_lang).
struct ActivityEmbedding {
  int d_vis = 0, d_lang = 0;
  std::vector<double> values;

  int dim() const { return static_cast<int>(values.size()); }
};

/// [e(part); e(verb); e(object)], dimension 3 * d_tok. The object may be the
/// reserved NONE token, which must itself be in the table.
std::vector<double> part_state_embedding(const PartStateTriple& triple,
                                         const EmbeddingTable& table);

/// Probability-weighted sum of state embeddings per part, averaged over the
/// parts present: higher-probability states contribute more.
std::vector<double> attend_linguistic(const PartStateProbs& probs, const EmbeddingTable& table);

/// Interactiveness-scaled mean of per-part visual features. Key sets of the
/// two maps must match.
std::vector<double> interactiveness_attention(
    const std::map<BodyPart, std::vector<double>>& visual,
    const std::map<BodyPart, double>& interactiveness);

/// [visual; linguistic] with dimensions checked against the configuration.
ActivityEmbedding fuse(const A2vConfig& config, const std::vector<double>& visual_attended,
                       const std::vector<double>& linguistic);

/// Triplet alignment term between modalities: inputs are L2-normalized
/// copies, then the squared-distance hinge applies. Training-time objective
/// only; fuse() never applies it.
double alignment_triplet_loss(const std::vector<double>& anchor_visual,
                              const std::vector<double>& positive_linguistic,
                              const std::vector<double>& negative_linguistic,
                              double margin = 0.2);

/// For each batch element, a uniformly sampled negative index whose activity
/// set is disjoint from the element's own; -1 when none exists.
std::vector<int> sample_alignment_negatives(
    const std::vector<std::set<ActivityLabel>>& batch_activities, std::uint64_t seed);

}  // namespace hake::a2v
