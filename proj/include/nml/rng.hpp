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

#ifndef NML_RNG_HPP
#define NML_RNG_HPP

#include <cstdint>
#include <random>

namespace nml {

/// One step of the splitmix64 generator. Advances `state`.
uint64_t splitmix64(uint64_t &state);

/// Seed for substream `index` of a master seed. Pure function of its inputs,
/// so trajectories can be scheduled in any order.
uint64_t derive_stream_seed(uint64_t master_seed, uint64_t index);

/// Per-trajectory random source. Uniform draws use the top 53 bits of a
/// 64-bit Mersenne twister so the sequence is identical across standard
/// libraries.
class Rng {
   public:
    explicit Rng(uint64_t seed) : engine_(seed) {
    }
    static Rng for_stream(uint64_t master_seed, uint64_t index) {
        return Rng(derive_stream_seed(master_seed, index));
    }

    uint64_t next_u64() {
        return engine_();
    }
    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

   private:
    std::mt19937_64 engine_;
};

}  // namespace nml

#endif
