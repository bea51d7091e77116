/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef NESSIM_RNG_HPP
#define NESSIM_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace nessim {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Hierarchical seed derivation: each (parent, name, index) triple yields an
/// independent stream, so adding a new named stream never shifts existing ones.
class SeedTree
{
  public:
    explicit SeedTree(std::uint64_t root) : m_root(root) {}

    [[nodiscard]] std::uint64_t root() const { return m_root; }

    [[nodiscard]] SeedTree child(std::string_view name, std::uint64_t index = 0) const
    {
        return SeedTree(splitmix64(splitmix64(m_root ^ fnv1a(name)) + index));
    }

    [[nodiscard]] Rng stream(std::string_view name, std::uint64_t index = 0) const
    {
        return Rng(child(name, index).root());
    }

  private:
    std::uint64_t m_root;
};

} // namespace nessim

#endif // NESSIM_RNG_HPP
