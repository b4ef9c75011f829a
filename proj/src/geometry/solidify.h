// Copyright 2026 The ClothForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "geometry/mesh.h"

namespace clothforge {

// Closed shell of the given thickness around an open manifold mesh.
//
// Vertex layout of the result: [0, n) is the copy offset by +thickness/2
// along the area-weighted vertex normals (the "top" side, keeping the input
// winding), [n, 2n) the copy offset by -thickness/2 with reversed winding.
// Boundary edges are stitched with two side triangles each. Keypoints keep
// their indices, so they refer to the top copy.
ClothMesh solidify(const ClothMesh& mesh, double thickness);

// Signed volume of a closed, outward-oriented mesh.
double signed_volume(const ClothMesh& mesh);

}  // namespace clothforge
