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

#ifndef NESSIM_TYPES_HPP
#define NESSIM_TYPES_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nessim/common.hpp"

namespace nessim {

/// One antenna configuration advertised through its own CSI-RS resource.
struct CsiRsConfig
{
    int id{1}; // 1..M, M is the full array
    int num_ports{32};
    int num_trx{32};
    double max_power_dbm{52.0};
    int csi_overhead_rbs{4};

    /// Per-RB PSD when P̄_m is spread evenly over the whole band.
    [[nodiscard]] double reference_psd_dbm(int total_rbs) const
    {
        return max_power_dbm - 10.0 * std::log10(static_cast<double>(total_rbs));
    }
};

/// The ordered configuration set 𝓜. Index 0 holds m=1 (fewest TRX).
class ConfigSet
{
  public:
    ConfigSet() = default;

    explicit ConfigSet(std::vector<CsiRsConfig> configs) : m_configs(std::move(configs)) { validate(); }

    /// Builds the set from TRX counts with P̄_m = P̄_M − 10·log10(N_M/N_m) and
    /// CSI-RS overhead proportional to the port count.
    static ConfigSet from_trx(std::vector<int> trx_counts, double max_power_dbm, double overhead_rbs_per_port)
    {
        std::sort(trx_counts.begin(), trx_counts.end());
        std::vector<CsiRsConfig> out;
        const int full = trx_counts.empty() ? 1 : trx_counts.back();
        for (std::size_t i = 0; i < trx_counts.size(); ++i) {
            CsiRsConfig c;
            c.id = static_cast<int>(i) + 1;
            c.num_trx = trx_counts[i];
            c.num_ports = trx_counts[i];
            c.max_power_dbm = max_power_dbm - 10.0 * std::log10(static_cast<double>(full) / trx_counts[i]);
            c.csi_overhead_rbs = static_cast<int>(std::lround(overhead_rbs_per_port * c.num_ports));
            out.push_back(c);
        }
        return ConfigSet(std::move(out));
    }

    void validate() const
    {
        if (m_configs.empty()) {
            throw DomainError("configuration set is empty");
        }
        for (std::size_t i = 0; i < m_configs.size(); ++i) {
            const auto& c = m_configs[i];
            if (c.id != static_cast<int>(i) + 1) {
                throw DomainError("configuration ids must run 1..M in order");
            }
            if (c.num_trx < 1 || c.num_ports < 1 || c.csi_overhead_rbs < 0) {
                throw DomainError("configuration " + std::to_string(c.id) + " has non-positive TRX/port count");
            }
            if (i > 0) {
                const auto& p = m_configs[i - 1];
                if (c.num_trx <= p.num_trx) {
                    throw DomainError("num_trx must be strictly increasing in m");
                }
                if (c.max_power_dbm < p.max_power_dbm) {
                    throw DomainError("max_power_dbm must be nondecreasing in m");
                }
                // overhead ∝ ports: cross-multiplied to stay in integers
                if (static_cast<long long>(c.csi_overhead_rbs) * p.num_ports !=
                    static_cast<long long>(p.csi_overhead_rbs) * c.num_ports) {
                    throw DomainError("csi_overhead_rbs must be proportional to num_ports");
                }
            }
        }
    }

    [[nodiscard]] int size() const { return static_cast<int>(m_configs.size()); }
    [[nodiscard]] const CsiRsConfig& at(int m) const
    {
        if (m < 1 || m > size()) {
            throw DomainError("configuration id " + std::to_string(m) + " outside 1.." + std::to_string(size()));
        }
        return m_configs[static_cast<std::size_t>(m - 1)];
    }
    [[nodiscard]] const CsiRsConfig& reference() const { return m_configs.back(); }
    [[nodiscard]] const std::vector<CsiRsConfig>& all() const { return m_configs; }

    /// id of the configuration with exactly `trx` TRX, or 0.
    [[nodiscard]] int find_trx(int trx) const
    {
        for (const auto& c : m_configs) {
            if (c.num_trx == trx) {
                return c.id;
            }
        }
        return 0;
    }

  private:
    std::vector<CsiRsConfig> m_configs;
};

/// Wideband CSI for one (UE, configuration) pair: γ_{n,m} at the PSD the
/// report was measured with, and α̂ = γ / S in the linear domain.
struct CsiReport
{
    UeId ue{0};
    int config_id{1};
    double gamma_db{0.0};
    double alpha_linear{0.0}; // per mW of PSD
    double psd_dbm{0.0};

    /// SINR this report predicts at another PSD.
    [[nodiscard]] double gamma_at_psd_db(double psd_dbm_per_rb) const
    {
        return linear_to_db(alpha_linear * db_to_linear(psd_dbm_per_rb));
    }
};

struct Allocation
{
    UeId ue{0};
    int rb_start{0}; // 0-based
    int rb_len{0};
    int mcs{1};
    double power_dbm{kNegInfDb};
    double psd_dbm_per_rb{kNegInfDb};
    bool retransmission{false};

    [[nodiscard]] int rb_end() const { return rb_start + rb_len; }
};

struct SlotDecision
{
    int chosen_config{1};
    std::vector<Allocation> allocations;
    int leftover_rbs{0};
    int csi_overhead_rbs{0};
    double beta{1.0};
    std::vector<std::string> warnings;

    [[nodiscard]] int used_rbs() const
    {
        int n = 0;
        for (const auto& a : allocations) {
            n += a.rb_len;
        }
        return n;
    }

    [[nodiscard]] bool idle() const { return allocations.empty(); }

    [[nodiscard]] const Allocation* find(UeId ue) const
    {
        for (const auto& a : allocations) {
            if (a.ue == ue) {
                return &a;
            }
        }
        return nullptr;
    }
};

/// Throws ContractViolation if any two allocations share an RB or a span leaves [0, B).
inline void check_orthogonal(const std::vector<Allocation>& allocs, int total_rbs)
{
    std::vector<char> used(static_cast<std::size_t>(std::max(total_rbs, 0)), 0);
    for (const auto& a : allocs) {
        if (a.rb_len < 1 || a.rb_start < 0 || a.rb_end() > total_rbs) {
            throw ContractViolation("allocation for UE " + std::to_string(a.ue) + " outside the RB grid");
        }
        for (int b = a.rb_start; b < a.rb_end(); ++b) {
            if (used[static_cast<std::size_t>(b)]) {
                throw ContractViolation("RB " + std::to_string(b) + " allocated twice");
            }
            used[static_cast<std::size_t>(b)] = 1;
        }
    }
}

} // namespace nessim

#endif // NESSIM_TYPES_HPP
