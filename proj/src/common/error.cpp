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

#include "common/error.h"

namespace clothforge {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kGenerationFailure: return "generation-failure";
    case ErrorCode::kSimulationDiverged: return "simulation-diverged";
    case ErrorCode::kConfig: return "config-error";
    case ErrorCode::kStageOrder: return "stage-order-error";
    case ErrorCode::kIo: return "write-error";
    case ErrorCode::kParse: return "parse-error";
    case ErrorCode::kCancelled: return "cancelled";
  }
  return "unknown";
}

}  // namespace clothforge
