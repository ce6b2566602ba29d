#pragma once

#include <cstdint>

#include "garner/dataset.hpp"

namespace garner {

struct SyntheticOptions {
  Real noise_scale = 0.1;   // config noise as a fraction of centroid spacing
  Real query_noise = 0.05;  // query noise, same units
  Real speed_noise = 0.5;   // additive traffic noise
  Index config_dim = 16;
  Index feature_dim = 8;
  Index k_spatial = 4;      // spatial kNN degree of the planted topology
  Index num_queries = 0;    // 0 means n / 10, at least 1
  int max_resamples = 64;   // connectivity retries for n >= 50
};

struct SyntheticData {
  RoadDataset dataset;
  LabelSet function;
  LabelSet traffic;
  LabelSet retrieval;
};

// Desk-scale dataset with planted structure:
//  - topology: spatial kNN graph over uniform random points, symmetrized
//    by union, resampled until connected (n >= 50);
//  - clusters: balanced assignment shuffled over space, so configuration
//    similarity carries no distance signal;
//  - C: cluster centroid plus Gaussian noise scaled to centroid spacing;
//  - function labels = cluster id; traffic = linear map of C plus noise;
//  - retrieval queries = noisy copies of C rows, source road as truth.
// Pure function of (n, clusters, seed, opts).
SyntheticData generate_synthetic(Index n, Index clusters, std::uint64_t seed,
                                 const SyntheticOptions& opts = {});

}  // namespace garner
