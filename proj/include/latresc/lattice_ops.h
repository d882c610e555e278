// Copyright 2026 The Latresc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LATRESC_LATTICE_OPS_H_
#define LATRESC_LATTICE_OPS_H_

#include <limits>
#include <optional>
#include <vector>

#include "latresc/lattice.h"

namespace latresc {

struct ScoreScales {
  double ac_scale = 1.0;
  double lm_scale = 1.0;

  double Apply(const Arc& arc) const { return ac_scale * arc.ac_score + lm_scale * arc.lm_score; }
};

// Forward-backward arc posteriors under exp(ac_scale*ac + lm_scale*lm),
// computed in the log domain. Throws on an empty lattice or when the total
// path mass underflows.
Lattice ComputeArcPosteriors(const Lattice& lattice, const ScoreScales& scales = {});

// Arc ids of the single best path under the scaled first-pass score. Ties
// are broken toward the lower arc id.
std::vector<int> ViterbiArcs(const Lattice& lattice, const ScoreScales& scales = {});

struct PruneOptions {
  // Arcs whose best path is more than `beam` below the global best go.
  double beam = std::numeric_limits<double>::infinity();
  // Arcs per second of speech.
  double max_density = std::numeric_limits<double>::infinity();
  ScoreScales scales;
};

// Beam pruning followed by posterior-ordered density pruning. The Viterbi
// path always survives, so the density bound is unattainable only when that
// path alone exceeds it. Posteriors, when the input has them, are
// recomputed on the result.
Lattice Prune(const Lattice& lattice, const PruneOptions& options);

struct LatticeStats {
  int num_nodes = 0;
  int num_arcs = 0;
  double duration_sec = 0.0;
  std::optional<double> density;  // arcs per second; unset for zero duration
};

LatticeStats Stats(const Lattice& lattice);

// log(exp(a) + exp(b)) without overflow.
double LogAdd(double a, double b);

}  // namespace latresc

#endif  // LATRESC_LATTICE_OPS_H_
