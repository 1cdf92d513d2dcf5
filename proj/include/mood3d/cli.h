/* Copyright 2026 The mood3d Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef MOOD3D_CLI_H_
#define MOOD3D_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace mood3d {

// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitEmptyGroundTruth = 2,
  kExitInternalError = 3,
};

// Runs the `mood3d` command line. args[0] is the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace mood3d

#endif  // MOOD3D_CLI_H_
