// Copyright 2026 The DPMNE Authors.
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

#include "dpmne/common.h"

#include <cstdlib>
#include <thread>

namespace dpmne {

int WorkerCount() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  const char* env = std::getenv("DPMNE_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  char* end = nullptr;
  long cap = std::strtol(env, &end, 10);
  if (end == env || cap <= 0) return hw;
  return static_cast<int>(std::min<long>(cap, hw));
}

}  // namespace dpmne
