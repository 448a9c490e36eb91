// Copyright 2026 The DisCo Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// The `disco` command line: train, eval, traverse, simmatrix, profile,
// scatter and sweep. Exit codes: 0 success, 2 configuration error, 3 any
// other failure.

#ifndef DISCO_TOOLS_CLI_HPP_
#define DISCO_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace disco::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace disco::cli

#endif  // DISCO_TOOLS_CLI_HPP_
