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

// Acceptance suite: one PASS/FAIL line per primary criterion. Exit status is
// nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

#include "support.hpp"

namespace {

using namespace nessim;
using Clock = std::chrono::steady_clock;

struct Outcome
{
    bool pass;
    std::string detail;
};

int g_failures = 0;

void criterion(const char* name, const std::function<Outcome()>& body)
{
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("%s  %-28s %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    g_failures += o.pass ? 0 : 1;
}

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Outcome la_oracle()
{
    Rng rng(101);
    std::uniform_int_distribution<int> kd(2, 32);
    std::uniform_real_distribution<double> gd(-25.0, 70.0);
    std::vector<std::pair<LinkAdapter, double>> cases;
    for (int i = 0; i < 1000; ++i) {
        cases.emplace_back(LinkAdapter(testing::random_table(rng, kd(rng)), BlerModel{}, 156), gd(rng));
    }
    const auto t0 = Clock::now();
    int mismatches = 0;
    for (const auto& [la, g] : cases) {
        const auto got = la.solve_baseline_la(g);
        const auto want = testing::oracle_baseline_la(la, g);
        mismatches += (got.mcs != want.mcs || got.feasible != want.feasible) ? 1 : 0;
    }
    const double t = elapsed(t0);
    return {mismatches == 0 && t < 1.0, std::to_string(mismatches) + " mismatches / 1000, solver time " +
                                            std::to_string(t) + " s"};
}

Outcome polite_oracle()
{
    const auto la = testing::default_adapter();
    Rng rng(202);
    std::uniform_int_distribution<int> kd(1, la.num_mcs());
    std::uniform_real_distribution<double> bd(0.05, 1.0);
    std::uniform_real_distribution<double> gd(-10.0, 35.0);
    std::uniform_int_distribution<Bits> qd(0, 1000000);
    std::uniform_int_distribution<int> cd(1, 273);
    const auto t0 = Clock::now();
    int mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
        const int k = kd(rng);
        const double b = bd(rng), g = gd(rng);
        const Bits q = qd(rng);
        const int cap = cd(rng);
        mismatches += la.solve_polite_la(k, b, g, q, cap) != testing::oracle_polite(la, k, b, g, q, cap) ? 1 : 0;
    }
    const double t = elapsed(t0);
    return {mismatches == 0 && t < 1.0, std::to_string(mismatches) + " mismatches / 1000"};
}

Outcome beta_law()
{
    Rng rng(303);
    std::uniform_int_distribution<int> nd(1, 12);
    std::uniform_int_distribution<Bits> qd(0, 1000000);
    std::uniform_real_distribution<double> rd(1.0, 1200.0);
    std::uniform_real_distribution<double> cd(0.01, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int n = nd(rng);
        std::vector<Bits> q(static_cast<std::size_t>(n));
        std::vector<double> r(static_cast<std::size_t>(n));
        double direct = 0.0;
        bool any = false;
        const BetaParams p{cd(rng), 0.05};
        for (int j = 0; j < n; ++j) {
            q[j] = qd(rng);
            r[j] = rd(rng);
            direct += static_cast<double>(q[j]) / (r[j] * 273.0);
            any = any || q[j] > 0;
        }
        direct = any ? std::max(std::min(p.chi * direct, 1.0), p.floor) : p.floor;
        worst = std::max(worst, std::abs(compute_beta(q, r, 273, p) - direct));
    }
    const std::vector<Bits> big{400000};
    const std::vector<double> r1{1000.0};
    const bool clamp_one = compute_beta(big, r1, 100, BetaParams{0.5, 0.05}) == 1.0;
    const std::vector<Bits> tiny{1};
    const bool clamp_floor = compute_beta(tiny, r1, 273, BetaParams{0.5, 0.05}) == 0.05;
    const std::vector<Bits> half{40000};
    const std::vector<double> r400{400.0};
    const bool example = std::abs(compute_beta(half, r400, 100, BetaParams{0.5, 0.05}) - 0.5) < 1e-15;
    std::ostringstream d;
    d << "max |err| " << worst << ", clamp 1 " << (clamp_one ? "ok" : "bad") << ", floor "
      << (clamp_floor ? "ok" : "bad");
    return {worst <= 1e-12 && clamp_one && clamp_floor && example, d.str()};
}

Outcome pc_model()
{
    Rng rng(404);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PcParams tabled;
    tabled.eta.table = {{0.0, 0.1}, {0.25, 0.22}, {0.5, 0.3}, {1.0, 0.4}};
    double worst = 0.0;
    int mono_bad = 0;
    PcParams fixed_eta;
    fixed_eta.eta.kappa = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double a = u(rng), f = u(rng), s = u(rng);
        for (const auto* p : {&tabled, &fixed_eta}) {
            worst = std::max(worst, std::abs(active_pc(a, f, s, *p) - testing::oracle_active_pc(a, f, s, *p)));
        }
        const PcParams def;
        worst = std::max(worst, std::abs(active_pc(a, f, s, def) - testing::oracle_active_pc(a, f, s, def)));
        const double d = 0.3 * u(rng);
        const double base = active_pc(a, f, s, fixed_eta);
        mono_bad += active_pc(std::min(a + d, 1.0), f, s, fixed_eta) < base ? 1 : 0;
        mono_bad += active_pc(a, std::min(f + d, 1.0), s, fixed_eta) < base ? 1 : 0;
        mono_bad += active_pc(a, f, std::min(s + d, 1.0), fixed_eta) < base ? 1 : 0;
    }
    // Sleep ordering for the bundled parameters and every validated variant.
    int order_bad = 0;
    std::vector<PcParams> sets{PcParams{}, tabled};
    const auto bundled = load_config(testing::config_dir() + "/default.json");
    sets.push_back(bundled.power);
    for (const auto& p : sets) {
        p.validate();
        const double micro = p.find(PowerState::Micro)->pc;
        const double light = p.find(PowerState::Light) ? p.find(PowerState::Light)->pc : micro;
        const double deep = p.find(PowerState::Deep) ? p.find(PowerState::Deep)->pc : light;
        order_bad += (deep <= light && light <= micro && micro < active_pc(0, 0, 0, p)) ? 0 : 1;
    }
    std::ostringstream d;
    d << "max |err| " << worst << ", monotonicity violations " << mono_bad << ", sleep-order violations "
      << order_bad;
    return {worst <= 1e-9 && mono_bad == 0 && order_bad == 0, d.str()};
}

Outcome alg1_invariants()
{
    const auto la = testing::default_adapter();
    const auto cs = testing::default_configs();
    const Scheduler s(la, cs, BetaParams{});
    Rng rng(505);
    int violations = 0;
    int reduced = 0;
    for (int i = 0; i < 500; ++i) {
        const auto f = testing::random_fixture(rng, cs, la);
        const auto r = s.alg1_schedule(f.input());
        const auto& d = r.decision;
        if (d.chosen_config != cs.size()) {
            ++reduced;
            violations += r.demanded_rbs > r.budget_rbs ? 1 : 0;
        }
        for (const auto& l : r.link) {
            violations += l.final_mcs > l.baseline_mcs ? 1 : 0;
            if (!l.retransmission) {
                violations += la.rate(l.final_mcs) < d.beta * la.rate(l.baseline_mcs) ? 1 : 0;
            }
        }
        try {
            check_orthogonal(d.allocations, f.total_rbs);
        } catch (const ContractViolation&) {
            ++violations;
        }
        violations += d.used_rbs() + d.csi_overhead_rbs > f.total_rbs ? 1 : 0;
        double p = 0.0;
        for (const auto& a : d.allocations) {
            p += db_to_linear(a.power_dbm);
        }
        violations += p > db_to_linear(cs.at(d.chosen_config).max_power_dbm) * (1.0 + 1e-9) ? 1 : 0;
    }
    return {violations == 0,
            std::to_string(violations) + " violations / 500 fixtures (" + std::to_string(reduced) + " with m' < M)"};
}

bool same_decision(const SlotDecision& a, const SlotDecision& b)
{
    if (a.chosen_config != b.chosen_config || a.allocations.size() != b.allocations.size() ||
        a.leftover_rbs != b.leftover_rbs) {
        return false;
    }
    for (std::size_t i = 0; i < a.allocations.size(); ++i) {
        const auto &x = a.allocations[i], &y = b.allocations[i];
        if (x.ue != y.ue || x.rb_start != y.rb_start || x.rb_len != y.rb_len || x.mcs != y.mcs ||
            x.power_dbm != y.power_dbm || x.psd_dbm_per_rb != y.psd_dbm_per_rb ||
            x.retransmission != y.retransmission) {
            return false;
        }
    }
    return true;
}

Outcome degeneracies()
{
    const auto la = testing::default_adapter();
    const auto cs = testing::default_configs();
    const Scheduler unit_beta(la, cs, BetaParams{0.5, 1.0});
    const Scheduler normal(la, cs, BetaParams{});
    Rng rng(606);
    int pa_bad = 0;
    int aa_bad = 0;
    for (int i = 0; i < 100; ++i) {
        const auto f = testing::random_fixture(rng, cs, la);
        const auto pa = unit_beta.schedule(Scheme{SchemeKind::PowerAdaptation, 0}, f.input());
        const auto st = unit_beta.schedule(Scheme{SchemeKind::Static, 32}, f.input());
        pa_bad += same_decision(pa.decision, st.decision) ? 0 : 1;
        const auto a1 = normal.alg1_schedule(f.input());
        const auto aa = normal.schedule(Scheme{SchemeKind::AntennaAdaptation, 0}, f.input());
        aa_bad += a1.decision.chosen_config == aa.decision.chosen_config ? 0 : 1;
    }
    return {pa_bad == 0 && aa_bad == 0, "PA(beta=1) vs Static32 mismatches " + std::to_string(pa_bad) +
                                            ", AA vs proposed m' mismatches " + std::to_string(aa_bad) + " / 100"};
}

Outcome conservation()
{
    auto cfg = load_config(testing::config_dir() + "/default.json");
    DropOptions o;
    o.check_conservation_every_slot = true;
    std::ostringstream d;
    bool ok = true;
    for (const char* scheme : {"Proposed", "Static8"}) {
        const auto r = run_drop(Scenario{cfg, *Scheme::parse(scheme), "high"}, 0, o);
        const auto& b = r.bits;
        ok = ok && b.balanced();
        d << scheme << ": arrived " << b.arrived << " = delivered " << b.delivered << " + buffered " << b.buffered
          << " + harq " << b.harq_pending << " + dropped " << (b.overflow_dropped + b.harq_dropped) << "; ";
    }
    return {ok, d.str()};
}

Outcome traffic_stats()
{
    Rng rng(707);
    TrafficParams p;
    p.arrival_rate = 100.0;
    const int slots = 1000000;
    std::int64_t total = 0;
    for (int i = 0; i < slots; ++i) {
        total += generate_arrivals(p, 0.5e-3, rng);
    }
    const double lambda = 0.05;
    const double mean = static_cast<double>(total) / slots;
    const double z = (mean - lambda) / std::sqrt(lambda / slots);
    std::ostringstream d;
    d << "mean " << mean << " vs 0.05, z = " << z;
    return {std::abs(z) <= 3.0, d.str()};
}

std::string csv_bytes(const std::vector<CellResult>& cells)
{
    std::ostringstream out;
    write_campaign_csv(out, campaign_rows(cells));
    write_ipv_cdf(out, ipv_series(cells));
    return out.str();
}

std::vector<CellResult> g_campaign;
double g_campaign_secs = 0.0;

Outcome trends()
{
    const auto cfg = load_config(testing::config_dir() + "/default.json");
    const auto t0 = Clock::now();
    g_campaign = run_campaign(cfg, 1);
    g_campaign_secs = elapsed(t0);
    for (const auto& c : g_campaign) {
        if (!c.result) {
            return {false, "cell " + c.scheme + "/" + c.load + " failed: " + c.error};
        }
    }
    const auto s = summarize(g_campaign);
    auto at = [&](const char* scheme, const std::string& load) { return s.at({scheme, load}); };
    bool a = true, f = true;
    for (const auto& l : cfg.traffic.load_order) {
        a = a && at("Proposed", l).pc_mean <= at("Static32", l).pc_mean;
        f = f && at("Proposed", l).rb_utilization >= at("Static32", l).rb_utilization;
    }
    const auto low = cfg.traffic.load_order.front();
    const auto high = cfg.traffic.load_order.back();
    const double reduction = 1.0 - at("Proposed", low).pc_mean / at("Static32", low).pc_mean;
    const bool b = reduction >= 0.25;
    const bool c = at("Proposed", low).upt_mbps.value_or(0.0) >= 0.9 * at("Static32", low).upt_mbps.value_or(0.0);
    const bool d = at("Proposed", high).upt_mbps.value_or(0.0) > at("Static8", high).upt_mbps.value_or(0.0);
    const bool e = at("Proposed", low).ipv_mean_dbm.value_or(0.0) <=
                   at("AntennaAdaptation", low).ipv_mean_dbm.value_or(-1e300);
    const bool runtime = g_campaign_secs < 300.0;
    std::ostringstream o;
    o.precision(4);
    o << "(a)" << (a ? "ok" : "FAIL") << " (b)" << (b ? "ok" : "FAIL") << " low-load PC reduction "
      << 100.0 * reduction << "%"
      << " (c)" << (c ? "ok" : "FAIL") << " UPT " << at("Proposed", low).upt_mbps.value_or(0.0) << " vs "
      << at("Static32", low).upt_mbps.value_or(0.0) << " (d)" << (d ? "ok" : "FAIL") << " UPT "
      << at("Proposed", high).upt_mbps.value_or(0.0) << " vs Static8 "
      << at("Static8", high).upt_mbps.value_or(0.0) << " (e)" << (e ? "ok" : "FAIL") << " IPV "
      << at("Proposed", low).ipv_mean_dbm.value_or(0.0) << " vs "
      << at("AntennaAdaptation", low).ipv_mean_dbm.value_or(0.0) << " dBm (f)" << (f ? "ok" : "FAIL")
      << "; 48 drops in " << g_campaign_secs << " s on 1 thread";
    return {a && b && c && d && e && f && runtime, o.str()};
}

Outcome determinism()
{
    const auto cfg = load_config(testing::config_dir() + "/default.json");
    if (g_campaign.empty()) {
        g_campaign = run_campaign(cfg, 1);
    }
    const std::string reference = csv_bytes(g_campaign);
    const int threads = std::max(4, static_cast<int>(std::thread::hardware_concurrency()));
    const std::string parallel = csv_bytes(run_campaign(cfg, threads));
    const std::string repeat = csv_bytes(run_campaign(cfg, 2));
    const bool ok = reference == parallel && reference == repeat;
    return {ok, std::string("parallelism 1 vs ") + std::to_string(threads) + " vs 2: " +
                    (ok ? "byte-identical" : "DIFFERENT") + " (" + std::to_string(reference.size()) + " bytes)"};
}

} // namespace

int main()
{
    criterion("LA oracle equivalence", la_oracle);
    criterion("POLITE oracle equivalence", polite_oracle);
    criterion("beta law", beta_law);
    criterion("PC model", pc_model);
    criterion("Joint scheduler invariants", alg1_invariants);
    criterion("Scheme degeneracies", degeneracies);
    criterion("Bit conservation", conservation);
    criterion("Traffic statistics", traffic_stats);
    criterion("Directional trends", trends);
    criterion("Determinism", determinism);
    std::printf("%s: %d failing criteria\n", g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures);
    return g_failures == 0 ? 0 : 1;
}
