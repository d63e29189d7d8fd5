// Copyright 2026 The vsod Authors.
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

#ifndef VSOD_TOOLS_CLI_HPP_
#define VSOD_TOOLS_CLI_HPP_

namespace vsod::cli {

// Exit codes: 0 success, 1 runtime or training failure, 2 usage or
// configuration error.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeFailure = 1;
inline constexpr int kUsageError = 2;

int run(int argc, char** argv);

}  // namespace vsod::cli

#endif  // VSOD_TOOLS_CLI_HPP_
