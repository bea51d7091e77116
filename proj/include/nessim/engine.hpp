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

#ifndef NESSIM_ENGINE_HPP
#define NESSIM_ENGINE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "nessim/channel.hpp"
#include "nessim/common.hpp"
#include "nessim/kpi.hpp"
#include "nessim/mcs.hpp"
#include "nessim/power.hpp"
#include "nessim/rng.hpp"
#include "nessim/scheduler.hpp"
#include "nessim/traffic.hpp"
#include "nessim/types.hpp"

namespace nessim {

// ---------------------------------------------------------------------------
// Scenario description
// ---------------------------------------------------------------------------

struct CellParams
{
    int num_ues{10};
    int total_rbs{273};
    double slot_duration_s{0.5e-3};
    std::vector<int> trx_set{8, 16, 32};
    double max_power_dbm{52.0};
    double csi_overhead_rbs_per_port{0.125};
};

struct ChannelParams
{
    double path_gain_min_db{-145.0};
    double path_gain_max_db{-115.0};
    double noise_floor_dbm_per_rb{-111.4};
    double fading_sigma_db{2.0};
    int csi_period_slots{1};
    InterferenceModel interference;
};

struct LinkParams
{
    std::string mcs_table_path;
    McsTable table;
    BlerModel bler;
    int re_per_rb{156};
    BetaParams beta;
    double r_avg_alpha{0.01};
    int max_harq_retx{4};
};

enum class RateScope
{
    PerUe,
    PerCell,
};

struct TrafficConfig
{
    // load label → packet arrival rate (packets/s); insertion order is kept by `load_order`.
    std::map<std::string, double> loads{{"low", 100.0}, {"light", 180.0}, {"medium", 340.0}, {"high", 500.0}};
    std::vector<std::string> load_order{"low", "light", "medium", "high"};
    Bits packet_size_bits{40000};
    Bits buffer_cap_bits{1000000};
    RateScope scope{RateScope::PerUe};
};

struct RunParams
{
    int num_drops{2};
    int slots_per_drop{5000};
    int warmup_slots{0};
    std::uint64_t base_seed{1};
    std::size_t ipv_reservoir{100000};
    bool trace{false};
};

/// Everything a campaign needs except the (scheme, load) cell coordinates.
struct SimConfig
{
    CellParams cell;
    ChannelParams channel;
    LinkParams link;
    PcParams power;
    TrafficConfig traffic;
    RunParams run;
    std::vector<Scheme> schemes{
        Scheme{SchemeKind::Static, 8},  Scheme{SchemeKind::Static, 16},         Scheme{SchemeKind::Static, 32},
        Scheme{SchemeKind::AntennaAdaptation, 0}, Scheme{SchemeKind::PowerAdaptation, 0}, Scheme{SchemeKind::Proposed, 0},
    };
    // Per-scheme χ / β-floor overrides keyed by scheme name; others use link.beta.
    std::map<std::string, BetaParams> scheme_beta;
    // Per-scheme TRX subsets (always containing the full array) keyed by scheme name.
    std::map<std::string, std::vector<int>> scheme_trx;

    [[nodiscard]] BetaParams beta_for(const Scheme& s) const
    {
        auto it = scheme_beta.find(s.name());
        return it == scheme_beta.end() ? link.beta : it->second;
    }

    [[nodiscard]] ConfigSet config_set() const
    {
        return ConfigSet::from_trx(cell.trx_set, cell.max_power_dbm, cell.csi_overhead_rbs_per_port);
    }

    /// Configuration set a scheme adapts over: its own TRX subset if configured.
    [[nodiscard]] ConfigSet config_set_for(const Scheme& s) const
    {
        auto it = scheme_trx.find(s.name());
        if (it == scheme_trx.end()) {
            return config_set();
        }
        return ConfigSet::from_trx(it->second, cell.max_power_dbm, cell.csi_overhead_rbs_per_port);
    }

    [[nodiscard]] LinkAdapter link_adapter() const { return LinkAdapter(link.table, link.bler, link.re_per_rb); }

    [[nodiscard]] double per_ue_rate(const std::string& load) const
    {
        auto it = traffic.loads.find(load);
        if (it == traffic.loads.end()) {
            throw DomainError("unknown load label '" + load + "'");
        }
        return traffic.scope == RateScope::PerUe ? it->second : it->second / cell.num_ues;
    }
};

/// One (scheme, load) cell of a campaign.
struct Scenario
{
    SimConfig config;
    Scheme scheme;
    std::string load;
};

// ---------------------------------------------------------------------------
// Drop results
// ---------------------------------------------------------------------------

struct TraceRow
{
    SlotPowerSample power;
    int used_rbs{0};
    int num_trx{0};
};

struct BitLedger
{
    Bits arrived{0};
    Bits delivered{0};
    Bits buffered{0};
    Bits harq_pending{0};
    Bits overflow_dropped{0};
    Bits harq_dropped{0};

    [[nodiscard]] bool balanced() const
    {
        return arrived == delivered + buffered + harq_pending + overflow_dropped + harq_dropped;
    }
};

struct DropOptions
{
    bool keep_trace{false};
    bool keep_packets{false};
    bool keep_decisions{false};
    bool check_conservation_every_slot{false};
    std::optional<bool> forced_outcome; // test hook: every transmission succeeds/fails
};

struct DropResult
{
    KpiRecord kpi;
    std::vector<TraceRow> trace;
    std::vector<PacketRecord> packets;
    std::vector<SlotDecision> decisions;
    std::map<std::string, int> warnings;
    BitLedger bits;
};

// ---------------------------------------------------------------------------
// Slot engine
// ---------------------------------------------------------------------------

/// One seeded drop of one cell. Slot phases, in order: arrivals, fading and
/// CSI refresh, idle check or scheduling, transmission outcomes, power
/// accounting, PF average update, KPI accumulation.
class Simulation
{
  public:
    Simulation(const Scenario& scenario, std::uint64_t drop_seed, DropOptions opts = {})
        : m_sc(scenario),
          m_opts(opts),
          m_configs(scenario.config.config_set_for(scenario.scheme)),
          m_la(scenario.config.link_adapter()),
          m_sched(m_la, m_configs, scenario.config.beta_for(scenario.scheme)),
          m_seeds(drop_seed),
          m_tracker(m_sc.config.power),
          m_kpi(scenario.config.cell.slot_duration_s, scenario.config.cell.total_rbs,
                scenario.config.run.ipv_reservoir, m_seeds.stream("ipv"))
    {
        const auto& cfg = m_sc.config;
        m_sched.check_scheme(m_sc.scheme);
        cfg.power.validate();
        cfg.channel.interference.validate();
        for (const auto& c : m_configs.all()) {
            (void)cfg.channel.interference.leakage_db(c.num_trx);
            if (c.csi_overhead_rbs > cfg.cell.total_rbs) {
                throw DomainError("CSI-RS overhead exceeds the number of RBs");
            }
        }
        m_traffic.arrival_rate = cfg.per_ue_rate(m_sc.load);
        m_traffic.packet_size_bits = cfg.traffic.packet_size_bits;
        m_traffic.load_label = m_sc.load;
        m_traffic.validate();

        Rng placement = m_seeds.stream("placement");
        std::uniform_real_distribution<double> gain(cfg.channel.path_gain_min_db, cfg.channel.path_gain_max_db);
        const auto n = static_cast<std::size_t>(cfg.cell.num_ues);
        const double r0 = static_cast<double>(m_la.bits_per_rb(1));
        for (std::size_t i = 0; i < n; ++i) {
            UeChannel ch;
            ch.path_gain_db = gain(placement);
            ch.noise_floor_dbm_per_rb = cfg.channel.noise_floor_dbm_per_rb;
            m_channels.push_back(ch);
            m_ues.emplace_back(static_cast<UeId>(i), cfg.traffic.buffer_cap_bits, cfg.link.max_harq_retx, r0);
            m_traffic_rng.push_back(m_seeds.stream("traffic", i));
            m_fading_rng.push_back(m_seeds.stream("fading", i));
            m_outcome_rng.push_back(m_seeds.stream("outcomes", i));
        }
        m_reports.assign(n, std::vector<std::optional<CsiReport>>(static_cast<std::size_t>(m_configs.size())));
    }

    [[nodiscard]] std::int64_t slot() const { return m_slot; }
    [[nodiscard]] const std::vector<UeState>& ues() const { return m_ues; }
    [[nodiscard]] std::vector<UeChannel>& channels() { return m_channels; }
    [[nodiscard]] const ConfigSet& configs() const { return m_configs; }
    [[nodiscard]] const LinkAdapter& link_adapter() const { return m_la; }

    /// Test hook: enqueue packets outside the Poisson process.
    void inject_packets(std::size_t ue_index, int count)
    {
        auto& ue = m_ues.at(ue_index);
        ue.enqueue(count, m_sc.config.traffic.packet_size_bits, m_slot);
        m_injected_arrivals += count;
    }

    /// Test hook: fix a UE's path gain (e.g. for closed-form traces).
    void set_path_gain(std::size_t ue_index, double db) { m_channels.at(ue_index).path_gain_db = db; }

    void run_slot() { run_slot(true); }

    /// Runs one slot; `arrivals=false` skips the Poisson arrivals phase.
    void run_slot(bool arrivals)
    {
        const auto& cfg = m_sc.config;
        const int total_rbs = cfg.cell.total_rbs;
        const bool record = m_slot >= cfg.run.warmup_slots;

        // (1) arrivals
        if (arrivals) {
            for (std::size_t i = 0; i < m_ues.size(); ++i) {
                const int count = generate_arrivals(m_traffic, cfg.cell.slot_duration_s, m_traffic_rng[i]);
                m_ues[i].enqueue(count, cfg.traffic.packet_size_bits, m_slot);
            }
        }

        // (2) fading and CSI
        draw_fading();
        const bool csi_slot = m_slot % cfg.channel.csi_period_slots == 0;
        if (csi_slot || !m_have_reports) {
            refresh_csi();
        }

        bool any = false;
        for (const auto& ue : m_ues) {
            any = any || ue.has_data();
        }

        // (3) idle → sleep
        if (!any) {
            const auto sample = m_tracker.idle(m_slot);
            if (record) {
                m_kpi.record_slot(sample.pc, 0);
            }
            if (m_opts.keep_trace || cfg.run.trace) {
                m_result.trace.push_back(TraceRow{sample, 0, 0});
            }
            if (m_opts.keep_decisions) {
                m_result.decisions.emplace_back();
            }
            finish_slot();
            return;
        }

        std::vector<UeRequest> requests;
        requests.reserve(m_ues.size());
        for (const auto& ue : m_ues) {
            requests.push_back(ue.request());
        }
        SlotInput in{requests, &m_reports, total_rbs, csi_slot};
        ScheduleResult res = m_sched.schedule(m_sc.scheme, in);
        SlotDecision& dec = res.decision;
        for (const auto& w : dec.warnings) {
            ++m_result.warnings[w];
        }
        validate_decision(dec);

        // (4) interference, realized SINR, outcomes
        const CsiRsConfig& cfg_m = m_configs.at(dec.chosen_config);
        const auto& im = cfg.channel.interference;
        const auto leak = leakage_per_rb(dec.allocations, total_rbs, im.leakage_db(cfg_m.num_trx),
                                         im.distance_slope_db, im.max_distance_rbs);
        if (record) {
            for (const auto& s : interference_per_rb(dec, m_configs, im, total_rbs)) {
                m_kpi.record_ipv(s.dbm);
            }
        }
        std::vector<Bits> delivered(m_ues.size(), 0);
        for (const auto& a : dec.allocations) {
            const std::size_t i = a.ue;
            const double sinr = realized_sinr_db(a, cfg_m, leak, m_channels[i]);
            const double p_err = m_la.bler(sinr, a.mcs);
            bool success;
            if (m_opts.forced_outcome) {
                success = *m_opts.forced_outcome;
            } else {
                std::uniform_real_distribution<double> u(0.0, 1.0);
                success = u(m_outcome_rng[i]) >= p_err;
            }
            TxResult tx = m_ues[i].apply_transmission(a, success, m_slot, m_la);
            delivered[i] = tx.delivered_bits;
            for (const auto& p : tx.completed) {
                if (record) {
                    m_kpi.record_packet(p.arrival_slot, p.completion_slot, p.size_bits);
                }
                if (m_opts.keep_packets) {
                    m_result.packets.push_back(p);
                }
            }
        }

        // (5) power
        const LoadRatios ratios = ratios_from_decision(dec, m_configs, total_rbs);
        const auto sample = m_tracker.active(m_slot, ratios);
        if (record) {
            m_kpi.record_slot(sample.pc, dec.used_rbs());
            m_kpi.record_active_config(cfg_m.num_trx);
        }
        if (m_opts.keep_trace || cfg.run.trace) {
            m_result.trace.push_back(TraceRow{sample, dec.used_rbs(), cfg_m.num_trx});
        }

        // (6) PF averages for UEs that were backlogged this slot
        for (std::size_t i = 0; i < m_ues.size(); ++i) {
            if (requests[i].has_data()) {
                m_ues[i].update_r_avg(delivered[i], total_rbs, cfg.link.r_avg_alpha);
            }
        }

        if (m_opts.keep_decisions) {
            m_result.decisions.push_back(std::move(dec));
        }
        finish_slot();
    }

    [[nodiscard]] BitLedger ledger() const
    {
        BitLedger b;
        for (const auto& ue : m_ues) {
            b.arrived += ue.arrived_bits();
            b.delivered += ue.delivered_bits();
            b.buffered += ue.buffer_bits();
            b.harq_pending += ue.harq_pending_bits();
            b.overflow_dropped += ue.overflow_dropped_bits();
            b.harq_dropped += ue.harq_dropped_bits();
        }
        return b;
    }

    /// Closes the drop and returns its KPIs and logs.
    DropResult finish()
    {
        std::int64_t arrived = 0;
        std::int64_t lost = 0;
        for (const auto& ue : m_ues) {
            arrived += ue.packets_arrived();
            lost += ue.packets_lost();
        }
        m_result.kpi = m_kpi.finish(m_sc.scheme.name(), m_sc.load, arrived, lost);
        m_result.bits = ledger();
        return std::move(m_result);
    }

  private:
    void draw_fading()
    {
        const double sigma = m_sc.config.channel.fading_sigma_db;
        // unit linear mean: E[10^(X/10)] = 1 for X ~ N(−σ²·ln10/20, σ²)
        const double mu = -sigma * sigma * std::log(10.0) / 20.0;
        for (std::size_t i = 0; i < m_channels.size(); ++i) {
            if (sigma > 0.0) {
                std::normal_distribution<double> nd(mu, sigma);
                m_channels[i].fading_linear = db_to_linear(nd(m_fading_rng[i]));
            } else {
                m_channels[i].fading_linear = 1.0;
            }
        }
    }

    void refresh_csi()
    {
        const auto& cfg = m_sc.config;
        for (std::size_t i = 0; i < m_channels.size(); ++i) {
            for (const auto& c : m_configs.all()) {
                m_reports[i][static_cast<std::size_t>(c.id - 1)] =
                    wideband_csi(static_cast<UeId>(i), m_channels[i], c, c.reference_psd_dbm(cfg.cell.total_rbs),
                                 cfg.channel.interference.intercell_floor_dbm_per_rb);
            }
        }
        m_have_reports = true;
    }

    /// Mean over the allocation's RBs of the per-RB SINR in dB. Intra-cell
    /// leakage reaches the UE through the same array and path gain as its own
    /// signal.
    [[nodiscard]] double realized_sinr_db(const Allocation& a, const CsiRsConfig& cfg_m,
                                          const std::vector<double>& leak, const UeChannel& ch) const
    {
        const double link_gain = array_gain_db(cfg_m) + ch.path_gain_db + linear_to_db(ch.fading_linear);
        const double floor_lin = db_to_linear(m_sc.config.channel.interference.intercell_floor_dbm_per_rb);
        double sum = 0.0;
        for (int b = a.rb_start; b < a.rb_end(); ++b) {
            const double leak_rx = leak[static_cast<std::size_t>(b)] + link_gain;
            const double interference_dbm = linear_to_db(floor_lin + db_to_linear(leak_rx));
            sum += sinr_db(ch, a.psd_dbm_per_rb, cfg_m, interference_dbm);
        }
        return sum / a.rb_len;
    }

    void validate_decision(const SlotDecision& dec) const
    {
        const int total_rbs = m_sc.config.cell.total_rbs;
        check_orthogonal(dec.allocations, total_rbs);
        if (dec.used_rbs() + dec.csi_overhead_rbs > total_rbs) {
            throw ContractViolation("allocations plus CSI-RS overhead exceed the band");
        }
        double power = 0.0;
        for (const auto& a : dec.allocations) {
            power += db_to_linear(a.power_dbm);
        }
        const double cap = db_to_linear(m_configs.at(dec.chosen_config).max_power_dbm);
        if (power > cap * (1.0 + 1e-9)) {
            throw ContractViolation("total transmit power exceeds the configuration's maximum");
        }
    }

    void finish_slot()
    {
        if (m_opts.check_conservation_every_slot && !ledger().balanced()) {
            throw ContractViolation("bit conservation violated at slot " + std::to_string(m_slot));
        }
        ++m_slot;
    }

    Scenario m_sc;
    DropOptions m_opts;
    ConfigSet m_configs;
    LinkAdapter m_la;
    Scheduler m_sched;
    SeedTree m_seeds;
    SleepTracker m_tracker;
    KpiAccumulator m_kpi;
    TrafficParams m_traffic;

    std::vector<UeChannel> m_channels;
    std::vector<UeState> m_ues;
    std::vector<Rng> m_traffic_rng;
    std::vector<Rng> m_fading_rng;
    std::vector<Rng> m_outcome_rng;
    ReportMatrix m_reports;
    bool m_have_reports{false};
    std::int64_t m_slot{0};
    std::int64_t m_injected_arrivals{0};
    DropResult m_result;
};

/// Seed of drop `drop` for a campaign: shared across schemes and loads so that
/// every scheme sees the same UE placement and fading realisation.
inline std::uint64_t drop_seed(std::uint64_t base_seed, int drop)
{
    return SeedTree(base_seed).child("drop", static_cast<std::uint64_t>(drop)).root();
}

inline DropResult run_drop(const Scenario& scenario, int drop, DropOptions opts = {})
{
    Simulation sim(scenario, drop_seed(scenario.config.run.base_seed, drop), opts);
    for (int t = 0; t < scenario.config.run.slots_per_drop; ++t) {
        sim.run_slot();
    }
    return sim.finish();
}

// ---------------------------------------------------------------------------
// Campaign
// ---------------------------------------------------------------------------

struct CellResult
{
    std::string scheme;
    std::string load;
    int drop{0};
    std::optional<DropResult> result;
    std::string error;
};

using ProgressFn = std::function<void(const CellResult&, std::size_t done, std::size_t total)>;

/// Runs schemes × loads × drops. Cells run on up to `parallelism` threads;
/// results come back in (scheme, load, drop) order regardless.
inline std::vector<CellResult> run_campaign(const SimConfig& config, int parallelism = 1,
                                            const ProgressFn& progress = {}, DropOptions opts = {})
{
    struct Job
    {
        Scenario scenario;
        int drop;
    };
    std::vector<Job> jobs;
    for (const auto& s : config.schemes) {
        for (const auto& load : config.traffic.load_order) {
            for (int d = 0; d < config.run.num_drops; ++d) {
                jobs.push_back(Job{Scenario{config, s, load}, d});
            }
        }
    }
    std::vector<CellResult> out(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) {
                return;
            }
            CellResult cell;
            cell.scheme = jobs[i].scenario.scheme.name();
            cell.load = jobs[i].scenario.load;
            cell.drop = jobs[i].drop;
            try {
                cell.result = run_drop(jobs[i].scenario, jobs[i].drop, opts);
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            out[i] = std::move(cell);
            const std::size_t n = done.fetch_add(1) + 1;
            if (progress) {
                std::lock_guard<std::mutex> lock(progress_mu);
                progress(out[i], n, jobs.size());
            }
        }
    };
    const int threads = std::max(1, std::min<int>(parallelism, static_cast<int>(jobs.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    return out;
}

/// Pooled per-(scheme, load) summary across drops.
struct CellSummary
{
    std::optional<double> upt_mbps; // packet-weighted
    double pc_mean{0.0};
    double rb_utilization{0.0};
    std::optional<double> ipv_mean_dbm; // sample-weighted
    double loss_rate{0.0};
    int drops{0};
};

inline std::map<std::pair<std::string, std::string>, CellSummary> summarize(const std::vector<CellResult>& cells)
{
    struct Acc
    {
        double upt_w{0.0};
        std::int64_t packets{0};
        double pc{0.0};
        double util{0.0};
        double loss{0.0};
        double ipv_w{0.0};
        std::int64_t ipv_n{0};
        int drops{0};
    };
    std::map<std::pair<std::string, std::string>, Acc> acc;
    for (const auto& c : cells) {
        if (!c.result) {
            continue;
        }
        const auto& k = c.result->kpi;
        auto& a = acc[{c.scheme, c.load}];
        if (k.upt_mbps) {
            a.upt_w += *k.upt_mbps * static_cast<double>(k.packets_completed);
            a.packets += k.packets_completed;
        }
        if (k.ipv_mean_dbm) {
            a.ipv_w += *k.ipv_mean_dbm * static_cast<double>(k.ipv_count);
            a.ipv_n += k.ipv_count;
        }
        a.pc += k.pc_mean;
        a.util += k.rb_utilization;
        a.loss += k.packet_loss_rate;
        ++a.drops;
    }
    std::map<std::pair<std::string, std::string>, CellSummary> out;
    for (const auto& [key, a] : acc) {
        CellSummary s;
        s.drops = a.drops;
        s.pc_mean = a.pc / a.drops;
        s.rb_utilization = a.util / a.drops;
        s.loss_rate = a.loss / a.drops;
        if (a.packets > 0) {
            s.upt_mbps = a.upt_w / static_cast<double>(a.packets);
        }
        if (a.ipv_n > 0) {
            s.ipv_mean_dbm = a.ipv_w / static_cast<double>(a.ipv_n);
        }
        out[key] = s;
    }
    return out;
}

} // namespace nessim

#endif // NESSIM_ENGINE_HPP
