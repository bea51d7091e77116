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

#ifndef NESSIM_SCHEDULER_HPP
#define NESSIM_SCHEDULER_HPP

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nessim/common.hpp"
#include "nessim/mcs.hpp"
#include "nessim/types.hpp"

namespace nessim {

// ---------------------------------------------------------------------------
// Scheme identifiers
// ---------------------------------------------------------------------------

enum class SchemeKind
{
    Static,
    AntennaAdaptation,
    PowerAdaptation,
    Proposed,
};

struct Scheme
{
    SchemeKind kind{SchemeKind::Proposed};
    int static_trx{0}; // only for SchemeKind::Static

    [[nodiscard]] std::string name() const
    {
        switch (kind) {
        case SchemeKind::Static:
            return "Static" + std::to_string(static_trx);
        case SchemeKind::AntennaAdaptation:
            return "AntennaAdaptation";
        case SchemeKind::PowerAdaptation:
            return "PowerAdaptation";
        case SchemeKind::Proposed:
            return "Proposed";
        }
        return "?";
    }

    /// Accepts "Proposed", "AntennaAdaptation", "PowerAdaptation" and "Static<N>".
    static std::optional<Scheme> parse(const std::string& s)
    {
        if (s == "Proposed") {
            return Scheme{SchemeKind::Proposed, 0};
        }
        if (s == "AntennaAdaptation") {
            return Scheme{SchemeKind::AntennaAdaptation, 0};
        }
        if (s == "PowerAdaptation") {
            return Scheme{SchemeKind::PowerAdaptation, 0};
        }
        if (s.rfind("Static", 0) == 0 && s.size() > 6) {
            int n = 0;
            for (char c : s.substr(6)) {
                if (c < '0' || c > '9') {
                    return std::nullopt;
                }
                n = n * 10 + (c - '0');
                if (n > 1 << 20) {
                    return std::nullopt;
                }
            }
            if (n < 1) {
                return std::nullopt;
            }
            return Scheme{SchemeKind::Static, n};
        }
        return std::nullopt;
    }

    friend bool operator==(const Scheme&, const Scheme&) = default;
};

// ---------------------------------------------------------------------------
// Per-slot inputs
// ---------------------------------------------------------------------------

struct HarqRequest
{
    Bits bits{0};
    int mcs{1};
};

/// What the scheduler sees of one UE: buffered new data, its PF average and
/// an optional pending retransmission (which takes priority over new data).
struct UeRequest
{
    UeId id{0};
    Bits buffer_bits{0};
    double r_avg{1.0}; // bits per slot per RB
    std::optional<HarqRequest> harq;

    [[nodiscard]] bool has_data() const { return buffer_bits > 0 || harq.has_value(); }
};

/// reports[i][m-1] is UE i's CSI for configuration m (nullopt when missing).
using ReportMatrix = std::vector<std::vector<std::optional<CsiReport>>>;

struct SlotInput
{
    std::span<const UeRequest> ues;
    const ReportMatrix* reports{nullptr};
    int total_rbs{273};
    bool csi_slot{true};
};

/// Link-adaptation trace for one served UE, kept for invariant checks.
struct UeLinkInfo
{
    UeId ue{0};
    int baseline_mcs{1}; // P1 solution at the chosen configuration
    int final_mcs{1};    // after POLITE
    bool retransmission{false};
};

struct ScheduleResult
{
    SlotDecision decision;
    std::vector<UeLinkInfo> link;
    int demanded_rbs{0}; // Σ baseline RB needs at the chosen configuration
    int budget_rbs{0};   // B minus CSI-RS overhead at the chosen configuration
};

// ---------------------------------------------------------------------------
// PF metric and contiguous allocation
// ---------------------------------------------------------------------------

/// X_n = R(k) / R_avg with a wideband CQI, so one value per UE.
inline double pf_metric(double instantaneous_rate, double r_avg)
{
    if (!(r_avg > 0.0)) {
        throw DomainError("pf_metric: average rate must be positive");
    }
    return instantaneous_rate / r_avg;
}

/// Indices into `metrics` in descending order; equal metrics keep ascending UE id.
inline std::vector<std::size_t> pf_order(std::span<const double> metrics, std::span<const UeId> ids)
{
    std::vector<std::size_t> idx(metrics.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        idx[i] = i;
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (metrics[a] != metrics[b]) {
            return metrics[a] > metrics[b];
        }
        return ids[a] < ids[b];
    });
    return idx;
}

struct RbDemand
{
    UeId ue{0};
    int rbs{0};
    bool divisible{true}; // a retransmission needs all of its RBs or none
};

/// Greedy first-fit in the given order: each UE takes min(demand, remaining),
/// spans laid out back to back from RB 0 at a uniform reference PSD.
inline std::vector<Allocation> allocate_contiguous(std::span<const RbDemand> ordered, int budget,
                                                   double reference_psd_dbm)
{
    std::vector<Allocation> out;
    int cursor = 0;
    int remaining = std::max(budget, 0);
    for (const auto& d : ordered) {
        if (d.rbs <= 0 || remaining == 0) {
            continue;
        }
        if (!d.divisible && d.rbs > remaining) {
            continue;
        }
        const int len = std::min(d.rbs, remaining);
        Allocation a;
        a.ue = d.ue;
        a.rb_start = cursor;
        a.rb_len = len;
        a.psd_dbm_per_rb = reference_psd_dbm;
        a.power_dbm = reference_psd_dbm + linear_to_db(static_cast<double>(len));
        out.push_back(a);
        cursor += len;
        remaining -= len;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scheduler
// ---------------------------------------------------------------------------

/// Joint antenna/power adaptation scheduler and its baselines. Pure function
/// of the slot input; the instance only carries configuration.
class Scheduler
{
  public:
    Scheduler(LinkAdapter la, ConfigSet configs, BetaParams beta)
        : m_la(std::move(la)), m_configs(std::move(configs)), m_beta(beta)
    {
        m_beta.validate();
    }

    [[nodiscard]] const LinkAdapter& link_adapter() const { return m_la; }
    [[nodiscard]] const ConfigSet& configs() const { return m_configs; }
    [[nodiscard]] const BetaParams& beta_params() const { return m_beta; }

    /// Throws DomainError when the scheme cannot run on this configuration set.
    void check_scheme(const Scheme& s) const
    {
        if (s.kind == SchemeKind::Static && m_configs.find_trx(s.static_trx) == 0) {
            throw DomainError("scheme " + s.name() + " needs a configuration with " + std::to_string(s.static_trx) +
                              " TRX");
        }
    }

    [[nodiscard]] ScheduleResult schedule(const Scheme& scheme, const SlotInput& in) const
    {
        switch (scheme.kind) {
        case SchemeKind::Proposed:
            return alg1_schedule(in);
        default:
            return baseline_schedule(scheme, in);
        }
    }

    /// Joint dynamic antenna and power adaptation.
    [[nodiscard]] ScheduleResult alg1_schedule(const SlotInput& in) const
    {
        return run(in, Mode{true, true, m_configs.size()});
    }

    [[nodiscard]] ScheduleResult baseline_schedule(const Scheme& scheme, const SlotInput& in) const
    {
        switch (scheme.kind) {
        case SchemeKind::Static: {
            check_scheme(scheme);
            return run(in, Mode{false, false, m_configs.find_trx(scheme.static_trx)});
        }
        case SchemeKind::AntennaAdaptation:
            return run(in, Mode{true, false, m_configs.size()});
        case SchemeKind::PowerAdaptation:
            return run(in, Mode{false, true, m_configs.size()});
        case SchemeKind::Proposed:
            break;
        }
        throw DomainError("baseline_schedule: " + scheme.name() + " is not a baseline scheme");
    }

  private:
    struct Mode
    {
        bool antenna_loop;
        bool power_adaptation;
        int start_config;
    };

    struct Candidate
    {
        std::size_t input_index;
        UeId id;
        Bits buffer;
        double r_avg;
        bool retx;
        int mcs;           // current MCS (restored/refined as the algorithm progresses)
        int baseline_mcs;  // P1 at the chosen configuration
        int need_rbs{0};   // RBs to empty the buffer at `mcs`
        int base_rbs{0};   // RBs to empty the buffer at `baseline_mcs`
        int granted{0};
        int power_rbs{0};  // reference-PSD RBs worth of power held by the UE
    };

    [[nodiscard]] int overhead(int m, const SlotInput& in) const
    {
        return in.csi_slot ? m_configs.at(m).csi_overhead_rbs : 0;
    }

    [[nodiscard]] const std::optional<CsiReport>& report(const SlotInput& in, std::size_t ue_index, int m) const
    {
        const auto& row = (*in.reports).at(ue_index);
        if (static_cast<int>(row.size()) != m_configs.size()) {
            throw ContractViolation("report row for UE " + std::to_string(in.ues[ue_index].id) +
                                    " does not cover every configuration");
        }
        return row[static_cast<std::size_t>(m - 1)];
    }

    [[nodiscard]] int rb_need(const Candidate& c, int mcs) const
    {
        return c.retx ? m_la.rbs_needed(c.buffer, c.mcs) : m_la.rbs_needed(c.buffer, mcs);
    }

    [[nodiscard]] std::vector<std::size_t> order_of(const std::vector<Candidate>& cands) const
    {
        // Retransmissions first, then PF order within each class.
        std::vector<double> metric;
        std::vector<UeId> ids;
        for (const auto& c : cands) {
            metric.push_back(pf_metric(static_cast<double>(m_la.bits_per_rb(c.mcs)), c.r_avg));
            ids.push_back(c.id);
        }
        auto idx = pf_order(metric, ids);
        std::stable_partition(idx.begin(), idx.end(), [&](std::size_t i) { return cands[i].retx; });
        return idx;
    }

    ScheduleResult run(const SlotInput& in, Mode mode) const
    {
        if (in.reports == nullptr || in.reports->size() != in.ues.size()) {
            throw ContractViolation("CSI report matrix must have one row per UE");
        }
        if (in.total_rbs < 1) {
            throw ContractViolation("total RBs must be positive");
        }
        ScheduleResult res;
        SlotDecision& dec = res.decision;
        const int big_m = m_configs.size();
        int chosen = mode.start_config;

        // Baseline LA at the starting (reference) configuration.
        std::vector<Candidate> cands;
        for (std::size_t i = 0; i < in.ues.size(); ++i) {
            const UeRequest& u = in.ues[i];
            if (!u.has_data()) {
                continue;
            }
            if (u.harq) {
                Candidate c{i, u.id, u.harq->bits, u.r_avg, true, u.harq->mcs, u.harq->mcs};
                cands.push_back(c);
                continue;
            }
            const auto& rep = report(in, i, chosen);
            if (!rep) {
                dec.warnings.push_back("UE " + std::to_string(u.id) + ": missing CSI for configuration " +
                                       std::to_string(chosen) + ", skipped");
                continue;
            }
            const auto la = m_la.solve_baseline_la(*rep);
            if (!la.feasible) {
                continue; // unschedulable this slot
            }
            cands.push_back(Candidate{i, u.id, u.buffer_bits, u.r_avg, false, la.mcs, la.mcs});
        }

        // PF order from the reference MCS.
        auto order = order_of(cands);

        auto demand_at = [&](const std::vector<Candidate>& cs) {
            int total = 0;
            for (const auto& c : cs) {
                total += rb_need(c, c.mcs);
            }
            return total;
        };

        // Greedy descent over reduced configurations.
        if (mode.antenna_loop) {
            for (int m = big_m - 1; m >= 1; --m) {
                std::vector<Candidate> trial = cands;
                bool feasible = true;
                bool skipped = false;
                for (auto& c : trial) {
                    if (c.retx) {
                        continue;
                    }
                    const auto& rep = report(in, c.input_index, m);
                    if (!rep) {
                        skipped = true;
                        break;
                    }
                    const auto la = m_la.solve_baseline_la(*rep);
                    if (!la.feasible) {
                        feasible = false;
                    }
                    c.mcs = la.mcs;
                }
                if (skipped) {
                    dec.warnings.push_back("configuration " + std::to_string(m) + " skipped: missing CSI report");
                    continue;
                }
                if (feasible && demand_at(trial) <= in.total_rbs - overhead(m, in)) {
                    chosen = m;
                    cands = std::move(trial);
                } else {
                    break; // k_n stays at the last feasible configuration
                }
            }
        }
        dec.chosen_config = chosen;
        const double ref_psd = m_configs.at(chosen).reference_psd_dbm(in.total_rbs);
        const int budget = in.total_rbs - overhead(chosen, in);
        if (budget < 0) {
            throw ContractViolation("CSI-RS overhead exceeds the slot's RBs");
        }
        dec.csi_overhead_rbs = overhead(chosen, in);
        res.budget_rbs = budget;
        for (auto& c : cands) {
            c.baseline_mcs = c.mcs;
            c.base_rbs = rb_need(c, c.mcs);
            c.need_rbs = c.base_rbs;
        }
        res.demanded_rbs = demand_at(cands);

        // Load-driven β and POLITE at the chosen configuration.
        double beta = 1.0;
        bool any_new = false;
        for (const auto& c : cands) {
            any_new = any_new || (!c.retx && c.buffer > 0);
        }
        if (mode.power_adaptation && any_new) {
            std::vector<Bits> q;
            std::vector<double> r;
            for (const auto& u : in.ues) {
                q.push_back(u.buffer_bits);
                r.push_back(u.r_avg);
            }
            beta = compute_beta(q, r, in.total_rbs, m_beta);
            // Each UE's PSD reduction may only use RBs no other UE needs.
            int reserved = 0;
            for (const auto& c : cands) {
                reserved += c.base_rbs;
            }
            for (std::size_t oi : order) {
                Candidate& c = cands[oi];
                reserved -= c.base_rbs;
                if (!c.retx) {
                    const auto& rep = report(in, c.input_index, chosen);
                    const int cap = budget - reserved;
                    c.mcs = m_la.solve_polite_la(c.baseline_mcs, beta, *rep, c.buffer, cap);
                    c.need_rbs = rb_need(c, c.mcs);
                }
                reserved += c.need_rbs;
            }
        }
        dec.beta = beta;

        // First-fit allocation in PF order (retransmissions first).
        std::vector<RbDemand> demands;
        for (std::size_t oi : order) {
            demands.push_back(RbDemand{static_cast<UeId>(oi), cands[oi].need_rbs, !cands[oi].retx});
        }
        int remaining = budget;
        for (const auto& a : allocate_contiguous(demands, budget, ref_psd)) {
            Candidate& c = cands[a.ue]; // ue field carries the candidate index here
            c.granted = a.rb_len;
            c.power_rbs = std::min(c.base_rbs, c.granted);
            remaining -= c.granted;
        }

        // Leftover RBs in refreshed PF order. Unmet demand first;
        // with power adaptation active (β < 1), extra RBs then spread each UE's
        // fixed power further as long as its MCS still meets the BLER target.
        if (remaining > 0) {
            order = order_of(cands);
            for (std::size_t oi : order) {
                Candidate& c = cands[oi];
                if (remaining == 0) {
                    break;
                }
                if (c.retx || c.granted == 0 || c.granted >= c.need_rbs) {
                    continue;
                }
                const int extra = std::min(c.need_rbs - c.granted, remaining);
                c.granted += extra;
                remaining -= extra;
            }
            if (mode.power_adaptation && beta < 1.0) {
                for (std::size_t oi : order) {
                    Candidate& c = cands[oi];
                    if (remaining == 0) {
                        break;
                    }
                    if (c.retx || c.granted == 0) {
                        continue;
                    }
                    const auto& rep = report(in, c.input_index, chosen);
                    int len = c.granted;
                    while (remaining > 0) {
                        const double psd =
                            ref_psd + linear_to_db(static_cast<double>(c.power_rbs) / static_cast<double>(len + 1));
                        if (!m_la.bler_ok(rep->gamma_at_psd_db(psd), c.mcs)) {
                            break;
                        }
                        ++len;
                        --remaining;
                    }
                    c.granted = len;
                }
            }
        }

        // Contiguous layout in the final order.
        int cursor = 0;
        for (std::size_t oi : order) {
            const Candidate& c = cands[oi];
            if (c.granted == 0) {
                continue;
            }
            Allocation a;
            a.ue = c.id;
            a.rb_start = cursor;
            a.rb_len = c.granted;
            a.mcs = c.mcs;
            a.retransmission = c.retx;
            a.power_dbm = ref_psd + linear_to_db(static_cast<double>(c.power_rbs));
            a.psd_dbm_per_rb = a.power_dbm - linear_to_db(static_cast<double>(c.granted));
            cursor += c.granted;
            dec.allocations.push_back(a);
            res.link.push_back(UeLinkInfo{c.id, c.baseline_mcs, c.mcs, c.retx});
        }
        dec.leftover_rbs = in.total_rbs - cursor - dec.csi_overhead_rbs;
        return res;
    }

    LinkAdapter m_la;
    ConfigSet m_configs;
    BetaParams m_beta;
};

} // namespace nessim

#endif // NESSIM_SCHEDULER_HPP
