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

#ifndef NESSIM_POWER_HPP
#define NESSIM_POWER_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "nessim/common.hpp"
#include "nessim/types.hpp"

namespace nessim {

enum class PowerState
{
    Active,
    Micro,
    Light,
    Deep,
};

inline const char* to_string(PowerState s)
{
    switch (s) {
    case PowerState::Active:
        return "active";
    case PowerState::Micro:
        return "micro";
    case PowerState::Light:
        return "light";
    case PowerState::Deep:
        return "deep";
    }
    return "?";
}

/// PA efficiency as a function of the load product x = s_f·s_p. Either
/// η_max·x^κ, or piecewise-linear interpolation over user points (x, η).
struct EtaModel
{
    double eta_max{0.4};
    double kappa{0.1};
    std::vector<std::pair<double, double>> table; // sorted by x; empty → power law

    [[nodiscard]] double operator()(double s_f, double s_p) const
    {
        const double x = s_f * s_p;
        if (table.empty()) {
            return eta_max * std::pow(x, kappa);
        }
        if (x <= table.front().first) {
            return table.front().second;
        }
        if (x >= table.back().first) {
            return table.back().second;
        }
        auto hi = std::lower_bound(table.begin(), table.end(), x,
                                   [](const std::pair<double, double>& p, double v) { return p.first < v; });
        auto lo = hi - 1;
        const double t = (x - lo->first) / (hi->first - lo->first);
        return lo->second + t * (hi->second - lo->second);
    }

    void validate() const
    {
        if (table.empty()) {
            if (!(eta_max > 0.0 && eta_max <= 1.0)) {
                throw DomainError("eta_max must lie in (0,1]");
            }
            if (kappa < 0.0) {
                throw DomainError("eta kappa must be nonnegative");
            }
            return;
        }
        for (std::size_t i = 0; i < table.size(); ++i) {
            const auto& [x, eta] = table[i];
            if (x < 0.0 || x > 1.0 || !(eta > 0.0 && eta <= 1.0)) {
                throw DomainError("eta table point " + std::to_string(i) + " outside [0,1]x(0,1]");
            }
            if (i > 0 && (x <= table[i - 1].first || eta < table[i - 1].second)) {
                throw DomainError("eta table must be strictly increasing in x and nondecreasing in eta");
            }
        }
    }
};

struct SleepStateParams
{
    PowerState state{PowerState::Micro};
    double pc{5.5};
    int entry_slots{1};
    double transition_energy{0.0};
};

/// Power-model parameters in relative units (deep sleep = 1). The defaults are
/// illustrative, not vendor data.
struct PcParams
{
    double p_static{6.0};
    double p_dyn_joint{25.0};
    double p_dyn_ante{4.0};
    EtaModel eta;
    // Ordered shallow → deep. Micro is mandatory; light/deep may be omitted.
    std::vector<SleepStateParams> sleep{
        {PowerState::Micro, 5.5, 1, 0.0},
        {PowerState::Light, 2.1, 10, 1.0},
        {PowerState::Deep, 1.0, 100, 5.0},
    };

    void validate() const
    {
        eta.validate();
        if (!(p_static > 0.0) || p_dyn_joint < 0.0 || p_dyn_ante < 0.0) {
            throw DomainError("p_static must be positive and dynamic terms nonnegative");
        }
        if (sleep.empty() || sleep.front().state != PowerState::Micro) {
            throw DomainError("sleep states must start with micro");
        }
        for (std::size_t i = 0; i < sleep.size(); ++i) {
            const auto& s = sleep[i];
            if (!(s.pc > 0.0) || s.entry_slots < 1 || s.transition_energy < 0.0) {
                throw DomainError(std::string("invalid parameters for sleep state ") + to_string(s.state));
            }
            if (i > 0) {
                const auto& p = sleep[i - 1];
                if (static_cast<int>(s.state) <= static_cast<int>(p.state)) {
                    throw DomainError("sleep states must be ordered micro, light, deep");
                }
                if (s.pc > p.pc) {
                    throw DomainError("deeper sleep states must not consume more power");
                }
                if (s.entry_slots <= p.entry_slots) {
                    throw DomainError("deeper sleep states need longer entry thresholds");
                }
            }
        }
        // Lowest active PC is p_static (s_a → 0); micro must stay below it.
        if (!(sleep.front().pc < p_static)) {
            throw DomainError("micro sleep PC must be below every active-state PC (p_static)");
        }
    }

    [[nodiscard]] const SleepStateParams* find(PowerState s) const
    {
        for (const auto& p : sleep) {
            if (p.state == s) {
                return &p;
            }
        }
        return nullptr;
    }
};

struct SlotPowerSample
{
    std::int64_t slot{0};
    PowerState state{PowerState::Active};
    double pc{0.0};
    double s_a{0.0};
    double s_f{0.0};
    double s_p{0.0};
};

/// Active-state DL consumption: s_a·(s_f·s_p·P_dyn,joint/η(s_f,s_p) + P_dyn,ante) + P_static.
inline double active_pc(double s_a, double s_f, double s_p, const PcParams& params)
{
    for (double r : {s_a, s_f, s_p}) {
        if (!(r >= 0.0 && r <= 1.0)) {
            throw DomainError("active_pc: ratios must lie in [0,1]");
        }
    }
    double pa = 0.0;
    const double load = s_f * s_p;
    if (load > 0.0) {
        const double eta = params.eta(s_f, s_p);
        if (!(eta > 0.0)) {
            throw DomainError("active_pc: PA efficiency is zero");
        }
        pa = load * params.p_dyn_joint / eta;
    }
    return s_a * (pa + params.p_dyn_ante) + params.p_static;
}

struct LoadRatios
{
    double s_a{0.0};
    double s_f{0.0};
    double s_p{0.0};
};

/// s_a = active/total TRX, s_f = used/B, s_p = RB-weighted mean linear PSD over
/// the full-array reference PSD P̄_M/B.
inline LoadRatios ratios_from_decision(const SlotDecision& decision, const ConfigSet& configs, int total_rbs)
{
    LoadRatios r;
    r.s_a = static_cast<double>(configs.at(decision.chosen_config).num_trx) / configs.reference().num_trx;
    const int used = decision.used_rbs();
    if (used == 0) {
        return r;
    }
    r.s_f = static_cast<double>(used) / total_rbs;
    double psd_sum = 0.0;
    for (const auto& a : decision.allocations) {
        psd_sum += db_to_linear(a.psd_dbm_per_rb) * a.rb_len;
    }
    const double ref = db_to_linear(configs.reference().reference_psd_dbm(total_rbs));
    r.s_p = std::min(psd_sum / used / ref, 1.0);
    return r;
}

/// Deepest enabled sleep state reachable after `idle_slots` consecutive idle slots.
inline std::pair<PowerState, double> sleep_step(std::int64_t idle_slots, const PcParams& params)
{
    if (idle_slots < 1) {
        throw DomainError("sleep_step: idle history must be >= 1");
    }
    const SleepStateParams* chosen = &params.sleep.front();
    for (const auto& s : params.sleep) {
        if (idle_slots >= s.entry_slots) {
            chosen = &s;
        }
    }
    return {chosen->state, chosen->pc};
}

/// Idle-run bookkeeping across slots; wake-up charges the transition energy of
/// the state being left onto the first active slot.
class SleepTracker
{
  public:
    explicit SleepTracker(const PcParams& params) : m_params(&params) {}

    SlotPowerSample idle(std::int64_t slot)
    {
        ++m_idle_run;
        auto [state, pc] = sleep_step(m_idle_run, *m_params);
        m_last = state;
        return SlotPowerSample{slot, state, pc, 0.0, 0.0, 0.0};
    }

    SlotPowerSample active(std::int64_t slot, const LoadRatios& r)
    {
        double pc = active_pc(r.s_a, r.s_f, r.s_p, *m_params);
        if (m_last != PowerState::Active) {
            if (const auto* s = m_params->find(m_last)) {
                pc += s->transition_energy;
            }
        }
        m_last = PowerState::Active;
        m_idle_run = 0;
        return SlotPowerSample{slot, PowerState::Active, pc, r.s_a, r.s_f, r.s_p};
    }

    [[nodiscard]] std::int64_t idle_run() const { return m_idle_run; }

  private:
    const PcParams* m_params;
    std::int64_t m_idle_run{0};
    PowerState m_last{PowerState::Active};
};

} // namespace nessim

#endif // NESSIM_POWER_HPP
