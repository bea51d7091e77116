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

// Shared fixtures and brute-force oracles for the unit and acceptance tests.
// Oracles are written independently of the library's search code.

#ifndef NESSIM_TESTS_SUPPORT_HPP
#define NESSIM_TESTS_SUPPORT_HPP

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "nessim/nessim.hpp"

namespace nessim::testing {

inline std::string config_dir() { return NESSIM_CONFIG_DIR; }

inline const McsTable& default_table()
{
    static const McsTable t = McsTable::load(config_dir() + "/mcs_table.csv");
    return t;
}

inline LinkAdapter default_adapter() { return LinkAdapter(default_table(), BlerModel{}, 156); }

inline ConfigSet default_configs() { return ConfigSet::from_trx({8, 16, 32}, 52.0, 0.125); }

inline SimConfig default_sim_config()
{
    SimConfig cfg;
    cfg.link.table = default_table();
    return cfg;
}

/// Random strictly monotone MCS table with K rows.
inline McsTable random_table(Rng& rng, int k)
{
    std::uniform_real_distribution<double> se_step(0.05, 0.6);
    std::uniform_real_distribution<double> thr_step(0.3, 3.0);
    std::uniform_real_distribution<double> thr0(-10.0, 0.0);
    std::vector<McsEntry> rows;
    double se = 0.1;
    double thr = thr0(rng);
    for (int i = 1; i <= k; ++i) {
        rows.push_back(McsEntry{i, se, thr});
        se += se_step(rng);
        thr += thr_step(rng);
    }
    return McsTable(rows);
}

/// Closed-form logistic BLER, evaluated independently of LinkAdapter.
inline double bler_closed_form(double gamma_db, double thr_db, double steepness, double target)
{
    return 1.0 / (1.0 + std::exp(steepness * (gamma_db - thr_db) + std::log((1.0 - target) / target)));
}

/// max{k : bler(γ,k) ≤ ε̄} by scanning every k; {1,false} if none qualifies.
inline BaselineLaResult oracle_baseline_la(const LinkAdapter& la, double gamma_db)
{
    BaselineLaResult best{1, false};
    for (int k = 1; k <= la.num_mcs(); ++k) {
        if (la.bler(gamma_db, k) <= la.bler_model().target_bler) {
            best = {k, true};
        }
    }
    return best;
}

/// Brute-force POLITE: every k′ ≤ k meeting the rate, BLER and RB-cap
/// constraints; the winner minimizes PSD (maximizes RBs), ties to larger k′.
inline int oracle_polite(const LinkAdapter& la, int k, double beta, double gamma_db, Bits buffer, int rb_cap)
{
    const Bits per_k = la.bits_per_rb(k);
    const Bits base = (buffer + per_k - 1) / per_k;
    if (base == 0 || base > rb_cap) {
        return k;
    }
    int best = k;
    Bits best_rbs = base;
    for (int c = 1; c < k; ++c) {
        const Bits per = la.bits_per_rb(c);
        const Bits rbs = (buffer + per - 1) / per;
        if (la.rate(c) < beta * la.rate(k) || rbs > rb_cap) {
            continue;
        }
        const double gamma = gamma_db + 10.0 * std::log10(static_cast<double>(base) / static_cast<double>(rbs));
        if (la.bler(gamma, c) > la.bler_model().target_bler) {
            continue;
        }
        if (rbs > best_rbs || (rbs == best_rbs && c > best)) {
            best = c;
            best_rbs = rbs;
        }
    }
    return best;
}

/// Independent evaluation of the active power formula.
inline double oracle_active_pc(double s_a, double s_f, double s_p, const PcParams& p)
{
    const double x = s_f * s_p;
    double eta;
    if (p.eta.table.empty()) {
        eta = p.eta.eta_max * std::exp(p.eta.kappa * std::log(x));
    } else {
        const auto& t = p.eta.table;
        eta = t.back().second;
        if (x <= t.front().first) {
            eta = t.front().second;
        }
        for (std::size_t i = 1; i < t.size(); ++i) {
            if (x > t[i - 1].first && x <= t[i].first) {
                const double w = (x - t[i - 1].first) / (t[i].first - t[i - 1].first);
                eta = (1.0 - w) * t[i - 1].second + w * t[i].second;
                break;
            }
        }
    }
    const double joint = x > 0.0 ? p.p_dyn_joint * x / eta : 0.0;
    return p.p_static + s_a * p.p_dyn_ante + s_a * joint;
}

/// A self-contained scheduler input: UE requests plus a full report matrix.
struct SlotFixture
{
    std::vector<UeRequest> ues;
    std::vector<UeChannel> channels;
    ReportMatrix reports;
    int total_rbs{273};
    bool csi_slot{true};

    [[nodiscard]] SlotInput input() const { return SlotInput{ues, &reports, total_rbs, csi_slot}; }
};

inline ReportMatrix reports_for(const std::vector<UeChannel>& channels, const ConfigSet& configs, int total_rbs,
                                double floor_dbm = -110.0)
{
    ReportMatrix m(channels.size(), std::vector<std::optional<CsiReport>>(static_cast<std::size_t>(configs.size())));
    for (std::size_t i = 0; i < channels.size(); ++i) {
        for (const auto& c : configs.all()) {
            m[i][static_cast<std::size_t>(c.id - 1)] = wideband_csi(static_cast<UeId>(i), channels[i], c,
                                                                     c.reference_psd_dbm(total_rbs), floor_dbm);
        }
    }
    return m;
}

/// Random slot: 1..12 UEs, mixed buffers (some empty, some HARQ-pending),
/// path gains spanning cell edge to cell centre.
inline SlotFixture random_fixture(Rng& rng, const ConfigSet& configs, const LinkAdapter& la)
{
    SlotFixture f;
    std::uniform_int_distribution<int> n_ues(1, 12);
    std::uniform_real_distribution<double> gain(-150.0, -110.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<Bits> buffer(1, 1000000);
    std::uniform_real_distribution<double> ravg(5.0, 600.0);
    std::uniform_int_distribution<int> mcs(1, la.num_mcs());
    std::bernoulli_distribution csi(0.7);
    const int n = n_ues(rng);
    f.csi_slot = csi(rng);
    for (int i = 0; i < n; ++i) {
        UeChannel ch;
        ch.path_gain_db = gain(rng);
        ch.fading_linear = std::pow(10.0, (u01(rng) * 4.0 - 2.0) / 10.0);
        f.channels.push_back(ch);
        UeRequest r;
        r.id = static_cast<UeId>(i);
        r.r_avg = ravg(rng);
        const double kind = u01(rng);
        if (kind < 0.15) {
            r.buffer_bits = 0;
        } else if (kind < 0.3) {
            r.buffer_bits = std::uniform_int_distribution<Bits>(1, 3000)(rng);
        } else {
            r.buffer_bits = buffer(rng);
        }
        if (u01(rng) < 0.1) {
            const int k = mcs(rng);
            r.harq = HarqRequest{std::uniform_int_distribution<Bits>(1, 40000)(rng), k};
        }
        f.ues.push_back(r);
    }
    f.reports = reports_for(f.channels, configs, f.total_rbs);
    return f;
}

} // namespace nessim::testing

#endif // NESSIM_TESTS_SUPPORT_HPP
