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

#ifndef NESSIM_TRAFFIC_HPP
#define NESSIM_TRAFFIC_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nessim/common.hpp"
#include "nessim/mcs.hpp"
#include "nessim/rng.hpp"
#include "nessim/scheduler.hpp"
#include "nessim/types.hpp"

namespace nessim {

/// FTP model 3: fixed-size packets with Poisson arrivals.
struct TrafficParams
{
    double arrival_rate{100.0}; // packets per second per UE
    Bits packet_size_bits{40000};
    std::string load_label{"low"};

    void validate() const
    {
        if (!(arrival_rate >= 0.0) || !std::isfinite(arrival_rate)) {
            throw DomainError("arrival rate must be finite and nonnegative");
        }
        if (packet_size_bits <= 0) {
            throw DomainError("packet size must be positive");
        }
    }
};

/// Number of packets arriving at one UE in one slot.
inline int generate_arrivals(const TrafficParams& params, double slot_duration_s, Rng& rng)
{
    const double mean = params.arrival_rate * slot_duration_s;
    if (mean <= 0.0) {
        return 0;
    }
    std::poisson_distribution<int> dist(mean);
    return dist(rng);
}

struct PacketRecord
{
    UeId ue{0};
    std::int64_t arrival_slot{0};
    std::int64_t completion_slot{0};
    Bits size_bits{0};
};

struct Packet
{
    std::uint64_t seq{0};
    std::int64_t arrival_slot{0};
    Bits size_bits{0};
    Bits untransmitted{0};
    Bits in_flight{0}; // transmitted but not yet acknowledged
    bool failed{false};
};

struct Segment
{
    std::uint64_t seq{0};
    Bits bits{0};
};

struct HarqBlock
{
    Bits bits{0};
    int mcs{1};
    int failures{0};
    std::vector<Segment> segments;
};

struct TxResult
{
    Bits delivered_bits{0};
    Bits dropped_bits{0};
    std::vector<PacketRecord> completed;
};

/// Per-UE buffer, packet FIFO and HARQ bookkeeping. Bits are conserved:
/// arrived = delivered + buffered + HARQ-pending + overflow-dropped + HARQ-dropped.
class UeState
{
  public:
    UeState(UeId id, Bits buffer_cap_bits, int max_retx, double initial_r_avg)
        : m_id(id), m_cap(buffer_cap_bits), m_max_retx(max_retx), m_r_avg(initial_r_avg)
    {
        if (buffer_cap_bits <= 0 || max_retx < 0 || !(initial_r_avg > 0.0)) {
            throw DomainError("invalid UE state parameters");
        }
    }

    [[nodiscard]] UeId id() const { return m_id; }
    [[nodiscard]] Bits buffer_bits() const { return m_buffer; }
    [[nodiscard]] Bits buffer_cap() const { return m_cap; }
    [[nodiscard]] double r_avg() const { return m_r_avg; }
    [[nodiscard]] const std::vector<HarqBlock>& harq() const { return m_harq; }
    [[nodiscard]] bool has_data() const { return m_buffer > 0 || !m_harq.empty(); }
    [[nodiscard]] const std::deque<Packet>& packets() const { return m_packets; }

    [[nodiscard]] Bits harq_pending_bits() const
    {
        Bits b = 0;
        for (const auto& h : m_harq) {
            b += h.bits;
        }
        return b;
    }

    // cumulative counters
    [[nodiscard]] Bits arrived_bits() const { return m_arrived; }
    [[nodiscard]] Bits delivered_bits() const { return m_delivered; }
    [[nodiscard]] Bits overflow_dropped_bits() const { return m_overflow_dropped; }
    [[nodiscard]] Bits harq_dropped_bits() const { return m_harq_dropped; }
    [[nodiscard]] std::int64_t packets_arrived() const { return m_packets_arrived; }
    [[nodiscard]] std::int64_t packets_lost() const { return m_packets_lost; }

    /// Admits `count` packets arriving in `slot`; a packet that would push the
    /// buffer past Q̄ is dropped whole.
    void enqueue(int count, Bits size_bits, std::int64_t slot)
    {
        for (int i = 0; i < count; ++i) {
            m_arrived += size_bits;
            ++m_packets_arrived;
            if (m_buffer + size_bits > m_cap) {
                m_overflow_dropped += size_bits;
                ++m_packets_lost;
                continue;
            }
            m_packets.push_back(Packet{m_next_seq++, slot, size_bits, size_bits, 0, false});
            m_buffer += size_bits;
        }
    }

    [[nodiscard]] UeRequest request() const
    {
        UeRequest r;
        r.id = m_id;
        r.buffer_bits = m_buffer;
        r.r_avg = m_r_avg;
        if (!m_harq.empty()) {
            r.harq = HarqRequest{m_harq.front().bits, m_harq.front().mcs};
        }
        return r;
    }

    /// Applies one transport block. New data drains the FIFO up to the
    /// allocation's capacity; a failed block joins the HARQ list and is dropped
    /// after `max_retx` retransmissions.
    TxResult apply_transmission(const Allocation& alloc, bool success, std::int64_t slot, const LinkAdapter& la)
    {
        if (alloc.ue != m_id) {
            throw ContractViolation("allocation for UE " + std::to_string(alloc.ue) + " applied to UE " +
                                    std::to_string(m_id));
        }
        if (!has_data()) {
            throw ContractViolation("allocation for UE " + std::to_string(m_id) + " with nothing to send");
        }
        TxResult res;
        if (alloc.retransmission) {
            if (m_harq.empty()) {
                throw ContractViolation("retransmission allocated without a pending HARQ block");
            }
            HarqBlock block = std::move(m_harq.front());
            m_harq.erase(m_harq.begin());
            if (success) {
                deliver(block.segments, slot, res);
            } else if (++block.failures > m_max_retx) {
                drop(block, slot, res);
            } else {
                m_harq.insert(m_harq.begin(), std::move(block));
            }
            return res;
        }
        if (!m_harq.empty()) {
            throw ContractViolation("new data scheduled while a retransmission is pending");
        }
        const Bits capacity = static_cast<Bits>(alloc.rb_len) * la.bits_per_rb(alloc.mcs);
        Bits take = std::min(capacity, m_buffer);
        HarqBlock block;
        block.mcs = alloc.mcs;
        block.bits = take;
        for (auto& p : m_packets) {
            if (take == 0) {
                break;
            }
            if (p.untransmitted == 0) {
                continue;
            }
            const Bits n = std::min(take, p.untransmitted);
            p.untransmitted -= n;
            p.in_flight += n;
            block.segments.push_back(Segment{p.seq, n});
            take -= n;
        }
        m_buffer -= block.bits;
        if (success) {
            deliver(block.segments, slot, res);
        } else {
            block.failures = 1;
            if (m_max_retx == 0) {
                drop(block, slot, res);
            } else {
                m_harq.push_back(std::move(block));
            }
        }
        return res;
    }

    /// PF average update in slots where the UE was backlogged.
    void update_r_avg(Bits delivered_bits, int total_rbs, double alpha)
    {
        m_r_avg = (1.0 - alpha) * m_r_avg + alpha * static_cast<double>(delivered_bits) / total_rbs;
        m_r_avg = std::max(m_r_avg, 1e-9);
    }

  private:
    Packet* find(std::uint64_t seq)
    {
        for (auto& p : m_packets) {
            if (p.seq == seq) {
                return &p;
            }
        }
        return nullptr;
    }

    void deliver(const std::vector<Segment>& segs, std::int64_t slot, TxResult& res)
    {
        for (const auto& s : segs) {
            Packet* p = find(s.seq);
            if (p == nullptr) {
                throw ContractViolation("delivered segment for unknown packet");
            }
            p->in_flight -= s.bits;
            res.delivered_bits += s.bits;
        }
        m_delivered += res.delivered_bits;
        retire(slot, res);
    }

    void drop(const HarqBlock& block, std::int64_t slot, TxResult& res)
    {
        for (const auto& s : block.segments) {
            Packet* p = find(s.seq);
            if (p == nullptr) {
                throw ContractViolation("dropped segment for unknown packet");
            }
            p->in_flight -= s.bits;
            if (!p->failed) {
                p->failed = true;
                ++m_packets_lost;
            }
        }
        m_harq_dropped += block.bits;
        res.dropped_bits += block.bits;
        retire(slot, res);
    }

    void retire(std::int64_t slot, TxResult& res)
    {
        while (!m_packets.empty() && m_packets.front().untransmitted == 0 && m_packets.front().in_flight == 0) {
            const Packet& p = m_packets.front();
            if (!p.failed) {
                res.completed.push_back(PacketRecord{m_id, p.arrival_slot, slot, p.size_bits});
            }
            m_packets.pop_front();
        }
    }

    UeId m_id;
    Bits m_cap;
    int m_max_retx;
    double m_r_avg;
    Bits m_buffer{0};
    std::deque<Packet> m_packets;
    std::vector<HarqBlock> m_harq;
    std::uint64_t m_next_seq{0};

    Bits m_arrived{0};
    Bits m_delivered{0};
    Bits m_overflow_dropped{0};
    Bits m_harq_dropped{0};
    std::int64_t m_packets_arrived{0};
    std::int64_t m_packets_lost{0};
};

} // namespace nessim

#endif // NESSIM_TRAFFIC_HPP
