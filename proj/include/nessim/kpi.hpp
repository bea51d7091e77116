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

#ifndef NESSIM_KPI_HPP
#define NESSIM_KPI_HPP

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nessim/common.hpp"
#include "nessim/rng.hpp"

namespace nessim {

/// UPT of one packet in Mbit/s; the delivery time spans the arrival slot through
/// the completion slot inclusive.
inline double upt_sample_mbps(Bits size_bits, std::int64_t arrival_slot, std::int64_t completion_slot,
                              double slot_duration_s)
{
    if (completion_slot < arrival_slot) {
        throw DomainError("packet completes before it arrives");
    }
    const double seconds = static_cast<double>(completion_slot - arrival_slot + 1) * slot_duration_s;
    return static_cast<double>(size_bits) / seconds / 1e6;
}

struct KpiRecord
{
    std::string scheme;
    std::string load;
    std::optional<double> upt_mbps;
    double pc_mean{0.0};
    double total_energy{0.0};
    std::vector<double> ipv_samples; // dBm, reservoir
    std::optional<double> ipv_mean_dbm;
    std::int64_t ipv_count{0};
    double rb_utilization{0.0};
    double packet_loss_rate{0.0};
    std::int64_t slots{0};
    std::int64_t packets_completed{0};
    std::map<int, std::int64_t> m_prime_histogram; // TRX count → active slots
};

/// Fixed-size uniform reservoir over a stream of values.
class Reservoir
{
  public:
    Reservoir(std::size_t capacity, Rng rng) : m_capacity(capacity), m_rng(std::move(rng)) {}

    void add(double v)
    {
        ++m_seen;
        if (m_samples.size() < m_capacity) {
            m_samples.push_back(v);
            return;
        }
        std::uniform_int_distribution<std::uint64_t> pick(0, m_seen - 1);
        const auto j = pick(m_rng);
        if (j < m_capacity) {
            m_samples[static_cast<std::size_t>(j)] = v;
        }
    }

    [[nodiscard]] const std::vector<double>& samples() const { return m_samples; }
    [[nodiscard]] std::uint64_t seen() const { return m_seen; }

  private:
    std::size_t m_capacity;
    Rng m_rng;
    std::vector<double> m_samples;
    std::uint64_t m_seen{0};
};

/// Drop-local KPI accumulation.
class KpiAccumulator
{
  public:
    KpiAccumulator(double slot_duration_s, int total_rbs, std::size_t ipv_capacity, Rng ipv_rng)
        : m_slot_s(slot_duration_s), m_total_rbs(total_rbs), m_ipv(ipv_capacity, std::move(ipv_rng))
    {
    }

    double record_packet(std::int64_t arrival_slot, std::int64_t completion_slot, Bits size_bits)
    {
        const double s = upt_sample_mbps(size_bits, arrival_slot, completion_slot, m_slot_s);
        m_upt_sum += s;
        ++m_upt_count;
        return s;
    }

    void record_slot(double pc, int used_rbs)
    {
        m_energy += pc;
        m_used_sum += static_cast<double>(used_rbs) / m_total_rbs;
        ++m_slots;
    }

    void record_active_config(int num_trx) { ++m_hist[num_trx]; }

    void record_ipv(double dbm)
    {
        m_ipv.add(dbm);
        m_ipv_sum += dbm;
        ++m_ipv_count;
    }

    [[nodiscard]] std::int64_t slots() const { return m_slots; }
    [[nodiscard]] double energy() const { return m_energy; }

    [[nodiscard]] KpiRecord finish(std::string scheme, std::string load, std::int64_t packets_arrived,
                                   std::int64_t packets_lost) const
    {
        KpiRecord r;
        r.scheme = std::move(scheme);
        r.load = std::move(load);
        if (m_upt_count > 0) {
            r.upt_mbps = m_upt_sum / static_cast<double>(m_upt_count);
        }
        r.slots = m_slots;
        r.total_energy = m_energy;
        r.pc_mean = m_slots > 0 ? m_energy / static_cast<double>(m_slots) : 0.0;
        r.rb_utilization = m_slots > 0 ? m_used_sum / static_cast<double>(m_slots) : 0.0;
        r.packet_loss_rate =
            packets_arrived > 0 ? static_cast<double>(packets_lost) / static_cast<double>(packets_arrived) : 0.0;
        r.ipv_samples = m_ipv.samples();
        r.ipv_count = m_ipv_count;
        if (m_ipv_count > 0) {
            r.ipv_mean_dbm = m_ipv_sum / static_cast<double>(m_ipv_count);
        }
        r.packets_completed = m_upt_count;
        r.m_prime_histogram = m_hist;
        return r;
    }

  private:
    double m_slot_s;
    int m_total_rbs;
    double m_upt_sum{0.0};
    std::int64_t m_upt_count{0};
    double m_energy{0.0};
    double m_used_sum{0.0};
    std::int64_t m_slots{0};
    Reservoir m_ipv;
    double m_ipv_sum{0.0};
    std::int64_t m_ipv_count{0};
    std::map<int, std::int64_t> m_hist;
};

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

/// Canonical 6-significant-digit rendering used in every exported file.
inline std::string format_float(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string format_histogram(const std::map<int, std::int64_t>& hist)
{
    std::string s;
    for (const auto& [trx, n] : hist) {
        s += (s.empty() ? "" : "|") + std::to_string(trx) + ":" + std::to_string(n);
    }
    return s;
}

struct CampaignRow
{
    std::string scheme;
    std::string load;
    int drop{0};
    KpiRecord kpi;
};

inline constexpr const char* kCampaignHeader =
    "scheme,load,drop,upt_mbps,pc_mean,rb_utilization,loss_rate,m_prime_histogram";

inline void write_campaign_csv(std::ostream& out, const std::vector<CampaignRow>& rows)
{
    out << kCampaignHeader << '\n';
    for (const auto& r : rows) {
        out << r.scheme << ',' << r.load << ',' << r.drop << ','
            << (r.kpi.upt_mbps ? format_float(*r.kpi.upt_mbps) : std::string("NA")) << ','
            << format_float(r.kpi.pc_mean) << ',' << format_float(r.kpi.rb_utilization) << ','
            << format_float(r.kpi.packet_loss_rate) << ',' << format_histogram(r.kpi.m_prime_histogram) << '\n';
    }
}

/// Empirical CDF as at most `max_points` (value, F) pairs, starting at (min, 0)
/// and ending at (max, 1).
inline std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> samples, std::size_t max_points = 200)
{
    std::vector<std::pair<double, double>> out;
    if (samples.empty()) {
        return out;
    }
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    out.emplace_back(samples.front(), 0.0);
    const std::size_t steps = std::max<std::size_t>(1, std::min(n, max_points - 1));
    for (std::size_t i = 1; i <= steps; ++i) {
        const std::size_t rank = (i * n + steps - 1) / steps; // 1..n
        out.emplace_back(samples[rank - 1], static_cast<double>(rank) / static_cast<double>(n));
    }
    return out;
}

struct IpvSeries
{
    std::string scheme;
    std::string load;
    std::vector<double> samples;
};

inline constexpr const char* kIpvHeader = "scheme,load,ipv_dbm,cdf";

inline void write_ipv_cdf(std::ostream& out, const std::vector<IpvSeries>& series, std::size_t max_points = 200)
{
    out << kIpvHeader << '\n';
    for (const auto& s : series) {
        for (const auto& [v, f] : empirical_cdf(s.samples, max_points)) {
            out << s.scheme << ',' << s.load << ',' << format_float(v) << ',' << format_float(f) << '\n';
        }
    }
}

} // namespace nessim

#endif // NESSIM_KPI_HPP
