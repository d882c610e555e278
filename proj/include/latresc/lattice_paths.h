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

#ifndef LATRESC_LATTICE_PATHS_H_
#define LATRESC_LATTICE_PATHS_H_

#include <span>
#include <vector>

#include "latresc/combine.h"
#include "latresc/lattice.h"

namespace latresc {

// Combined score of one arc: ac + gamma*lm + sum_s w_s*model_s, plus kappa
// when the arc enters a real word. Throws Error if a weighted stream is
// missing on the arc.
double ArcCombinedScore(const Lattice& lattice, const Arc& arc, const Coefficients& coeffs);

// Per-arc combined scores for every arc, indexed by arc id.
std::vector<double> ArcCombinedScores(const Lattice& lattice, const Coefficients& coeffs);

// Hypothesis for a start-to-end arc path. Stream totals cover "ac", "lm" and
// every model stream present on all arcs of the path.
Hypothesis HypothesisFromArcs(const Lattice& lattice, std::span<const int> arc_path);

}  // namespace latresc

#endif  // LATRESC_LATTICE_PATHS_H_
