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

#ifndef NML_READOUT_HPP
#define NML_READOUT_HPP

#include <string>

namespace nml {

/// Which measurement records are kept.
///   Complete: ZZ and X outcomes recorded, state stays pure.
///   None:     both layers act as dephasing channels.
///   Partial:  ZZ outcomes recorded, X layer dephases.
enum class Readout { Complete, None, Partial };

std::string to_string(Readout readout);

/// Accepts "complete", "none" or "partial". Throws ContractError otherwise.
Readout parse_readout(const std::string &text);

}  // namespace nml

#endif
