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

#ifndef NESSIM_CHANNEL_HPP
#define NESSIM_CHANNEL_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "nessim/common.hpp"
#include "nessim/types.hpp"

namespace nessim {

struct UeChannel
{
    double path_gain_db{-130.0};
    double noise_floor_dbm_per_rb{-111.4};
    double fading_linear{1.0};
};

/// Frequency-domain leakage between adjacent allocations plus a constant
/// inter-cell floor. Leakage attenuation is keyed by TRX count.
struct InterferenceModel
{
    std::map<int, double> leakage_db_by_trx{{8, 20.0}, {16, 25.0}, {32, 30.0}};
    double intercell_floor_dbm_per_rb{-110.0};
    double distance_slope_db{3.0};
    int max_distance_rbs{8};

    void validate() const
    {
        if (leakage_db_by_trx.empty()) {
            throw DomainError("leakage map is empty");
        }
        double prev = -std::numeric_limits<double>::infinity();
        for (const auto& [trx, att] : leakage_db_by_trx) {
            if (trx < 1) {
                throw DomainError("leakage map keys must be positive TRX counts");
            }
            if (att < prev) {
                throw DomainError("leakage attenuation must not grow as the TRX count decreases");
            }
            prev = att;
        }
        if (distance_slope_db < 0.0 || max_distance_rbs < 0) {
            throw DomainError("leakage distance law must be nonnegative");
        }
    }

    [[nodiscard]] double leakage_db(int num_trx) const
    {
        auto it = leakage_db_by_trx.find(num_trx);
        if (it == leakage_db_by_trx.end()) {
            throw DomainError("no leakage attenuation configured for " + std::to_string(num_trx) + " TRX");
        }
        return it->second;
    }
};

inline double array_gain_db(const CsiRsConfig& cfg)
{
    return 10.0 * std::log10(static_cast<double>(cfg.num_trx));
}

/// Per-RB SINR: PSD + array gain + path gain + fading over noise ⊕ interference.
inline double sinr_db(const UeChannel& ue, double psd_dbm_per_rb, const CsiRsConfig& cfg,
                      double interference_dbm_per_rb)
{
    const double signal = psd_dbm_per_rb + array_gain_db(cfg) + ue.path_gain_db + linear_to_db(ue.fading_linear);
    const double denom = db_to_linear(ue.noise_floor_dbm_per_rb) + db_to_linear(interference_dbm_per_rb);
    return signal - linear_to_db(denom);
}

/// Intra-cell leakage landing on every RB, in the transmit-referenced domain
/// (dBm, −inf where nothing leaks). An RB in one allocation picks up the nearest
/// neighbouring allocation on each side at PSD − attenuation − slope·d, where d
/// counts RBs between them (0 when adjacent) and only d ≤ max_distance counts.
inline std::vector<double> leakage_per_rb(const std::vector<Allocation>& allocs, int total_rbs,
                                          double attenuation_db, double slope_db, int max_distance)
{
    std::vector<double> out(static_cast<std::size_t>(total_rbs), kNegInfDb);
    std::vector<const Allocation*> sorted;
    sorted.reserve(allocs.size());
    for (const auto& a : allocs) {
        sorted.push_back(&a);
    }
    std::sort(sorted.begin(), sorted.end(),
              [](const Allocation* a, const Allocation* b) { return a->rb_start < b->rb_start; });

    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const Allocation& self = *sorted[i];
        const Allocation* left = i > 0 ? sorted[i - 1] : nullptr;
        const Allocation* right = i + 1 < sorted.size() ? sorted[i + 1] : nullptr;
        for (int b = self.rb_start; b < self.rb_end(); ++b) {
            double lin = 0.0;
            if (left != nullptr) {
                const int d = b - left->rb_end();
                if (d <= max_distance) {
                    lin += db_to_linear(left->psd_dbm_per_rb - attenuation_db - slope_db * d);
                }
            }
            if (right != nullptr) {
                const int d = right->rb_start - b - 1;
                if (d <= max_distance) {
                    lin += db_to_linear(right->psd_dbm_per_rb - attenuation_db - slope_db * d);
                }
            }
            out[static_cast<std::size_t>(b)] = linear_to_db(lin);
        }
    }
    return out;
}

struct RbInterference
{
    int rb{0};
    double dbm{0.0};
};

/// Interference power value on every occupied RB: inter-cell floor ⊕ leakage
/// from the neighbouring allocations under the slot's antenna configuration.
inline std::vector<RbInterference> interference_per_rb(const SlotDecision& decision, const ConfigSet& configs,
                                                       const InterferenceModel& model, int total_rbs)
{
    check_orthogonal(decision.allocations, total_rbs);
    const double att = model.leakage_db(configs.at(decision.chosen_config).num_trx);
    const auto leak =
        leakage_per_rb(decision.allocations, total_rbs, att, model.distance_slope_db, model.max_distance_rbs);
    std::vector<RbInterference> out;
    for (const auto& a : decision.allocations) {
        for (int b = a.rb_start; b < a.rb_end(); ++b) {
            out.push_back({b, db_sum(model.intercell_floor_dbm_per_rb, leak[static_cast<std::size_t>(b)])});
        }
    }
    std::sort(out.begin(), out.end(), [](const RbInterference& x, const RbInterference& y) { return x.rb < y.rb; });
    return out;
}

/// Wideband CSI report at the configuration's reference PSD with only the
/// inter-cell floor as interference (allocations are unknown at report time).
inline CsiReport wideband_csi(UeId ue_id, const UeChannel& ue, const CsiRsConfig& cfg, double reference_psd_dbm,
                              double interference_dbm_per_rb)
{
    CsiReport r;
    r.ue = ue_id;
    r.config_id = cfg.id;
    r.psd_dbm = reference_psd_dbm;
    r.gamma_db = sinr_db(ue, reference_psd_dbm, cfg, interference_dbm_per_rb);
    r.alpha_linear = db_to_linear(r.gamma_db) / db_to_linear(reference_psd_dbm);
    return r;
}

} // namespace nessim

#endif // NESSIM_CHANNEL_HPP
