#pragma once

// Desk-scale generators standing in for extracted model activations.
// Every generator is a pure function of its arguments (seeded mt19937_64).

#include "conceptkit/activation_store.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace conceptkit {

struct SynthBipolarParams {
    Eigen::Index d = 8;
    Eigen::Index n_per_pole = 50;
    double pole_gap = 10.0;
    Eigen::Index within_pole_rank = 3;
    std::uint64_t seed = 0;
    // Per-direction noise RMS; unset means within_pole_spread(pole_gap).
    std::optional<double> noise_scale;
};

// Per-direction RMS of the within-pole noise for a given pole gap.
// 0.6·gap sits between gap/2 (pole-only top-rank excludes the concept axis)
// and gap/√2 (pooled poles keep the concept axis on top).
[[nodiscard]] double within_pole_spread(double pole_gap);

// Pole means ±(gap/2)·u around the origin for a random unit u. Each pole gets
// zero-mean noise in its own within_pole_rank-dimensional subspace of u⊥; the
// two subspaces are disjoint when 2·rank + 1 <= d and wrap around otherwise.
// Noise coordinates are centred and whitened per pole, so every retained
// noise direction carries exactly noise_scale² energy.
// Rows: n_per_pole positive followed by n_per_pole negative.
[[nodiscard]] ActivationBundle synth_bipolar(const SynthBipolarParams& params);

struct ConceptPair {
    ActivationBundle a;
    ActivationBundle b;
};

// Two concepts whose rank-k generating subspaces share exactly `shared`
// directions (requires 2k - shared <= d). Small isotropic noise on top.
[[nodiscard]] ConceptPair synth_concept_pair(Eigen::Index d, Eigen::Index n, Eigen::Index k,
                                             Eigen::Index shared, std::uint64_t seed);

struct SuiteLayer {
    ActivationBundle pooled;       // bipolar rows for the conceptor
    ActivationBundle probe_train;  // split: train
    ActivationBundle probe_test;   // split: test
    double margin = 0.0;
    Eigen::Index rank = 0;
};

// Pseudo-layers whose pole margin rises then falls with depth. The number of
// active within-concept directions is coupled to the margin, so quota and
// probe separability move together.
[[nodiscard]] std::vector<SuiteLayer> synth_layer_suite(Eigen::Index d, Eigen::Index n_per_pole,
                                                        int layers, std::uint64_t seed);

} // namespace conceptkit
