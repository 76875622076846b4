/*  Copyright 2026 The factlog Authors

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License. */

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace factlog {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,     // bad flags, missing required options, bad query text
  kExitInput = 3,     // no inputs, unreadable files, bad specs or fact files
  kExitAnalysis = 4,  // Datalog program errors during solving
};

/// Runs one command line (without the program name). Normal output goes to
/// `out`, summaries and diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace factlog
