// Copyright 2026 The nml Authors
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

#ifndef NML_CLI_HPP
#define NML_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace nml::cli {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

/// Runs the command line tool on `args` (without the program name). Primary
/// results go to `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Formats a double with 17 significant digits; "inf", "-inf" or "nan" otherwise.
std::string format_number(double value);

/// One RFC 4180 record, CRLF terminated. Fields with commas, quotes or line
/// breaks are quoted.
std::string csv_record(const std::vector<std::string> &fields);

}  // namespace nml::cli

#endif
