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

#ifndef NESSIM_COMMON_HPP
#define NESSIM_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace nessim {

/// Raised when a module's documented precondition or invariant is broken at run time.
class ContractViolation : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

/// Raised for arguments outside a function's mathematical domain.
class DomainError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

using Bits = std::int64_t;
using UeId = std::uint32_t;

constexpr double kNegInfDb = -std::numeric_limits<double>::infinity();

inline double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

inline double linear_to_db(double lin)
{
    if (lin <= 0.0) {
        return kNegInfDb;
    }
    return 10.0 * std::log10(lin);
}

/// Power sum of two dB quantities (a ⊕ b).
inline double db_sum(double a_db, double b_db)
{
    return linear_to_db(db_to_linear(a_db) + db_to_linear(b_db));
}

} // namespace nessim

#endif // NESSIM_COMMON_HPP
