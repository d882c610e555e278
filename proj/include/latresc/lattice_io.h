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

// Text lattice format, one record per line:
//
//   UTT=<id> FRAMESHIFT=<ms> N=<nodes> L=<arcs>
//   I=<id> t=<frame> W=<word>
//   J=<id> S=<src> E=<dst> a=<ac> l=<lm> [p=<post>] [m:<stream>=<score>]*
//
// Lines starting with '#' and blank lines are ignored. Scores are written
// with six decimals; serialization is canonical (nodes then arcs, ascending
// id, model streams sorted by name).

#ifndef LATRESC_LATTICE_IO_H_
#define LATRESC_LATTICE_IO_H_

#include <string>
#include <string_view>

#include "latresc/lattice.h"

namespace latresc {

// Parses and validates. Throws FormatError (with line number) on syntax
// problems and ValidationError on invariant violations.
Lattice ParseLattice(std::string_view text);

std::string SerializeLattice(const Lattice& lattice);

Lattice ReadLatticeFile(const std::string& path);
void WriteLatticeFile(const std::string& path, const Lattice& lattice);

// Whole-file helpers shared by the file formats. WriteFileAtomic writes to a
// sibling temporary and renames it into place.
std::string ReadFile(const std::string& path);
void WriteFileAtomic(const std::string& path, std::string_view contents);

}  // namespace latresc

#endif  // LATRESC_LATTICE_IO_H_
