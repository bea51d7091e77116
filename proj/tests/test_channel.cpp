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

#include <gtest/gtest.h>

#include "support.hpp"

namespace nessim {
namespace {

CsiRsConfig cfg_with(int trx)
{
    CsiRsConfig c;
    c.num_trx = trx;
    c.num_ports = trx;
    return c;
}

Allocation alloc(UeId ue, int start, int len, double psd)
{
    Allocation a;
    a.ue = ue;
    a.rb_start = start;
    a.rb_len = len;
    a.psd_dbm_per_rb = psd;
    a.power_dbm = psd + 10.0 * std::log10(len);
    return a;
}

TEST(ArrayGain, Examples)
{
    EXPECT_DOUBLE_EQ(array_gain_db(cfg_with(1)), 0.0);
    EXPECT_NEAR(array_gain_db(cfg_with(32)), 15.05, 0.005);
    EXPECT_NEAR(array_gain_db(cfg_with(16)) - array_gain_db(cfg_with(8)), 10.0 * std::log10(2.0), 1e-12);
}

TEST(Sinr, NoiseLimitedClosedForm)
{
    UeChannel ue{-120.0, -111.4, 1.0};
    const double s = sinr_db(ue, 20.0, cfg_with(32), kNegInfDb);
    EXPECT_NEAR(s, 20.0 + 10.0 * std::log10(32.0) - 120.0 + 111.4, 1e-9);
}

TEST(Sinr, PsdPlusThreeGivesPlusThree)
{
    UeChannel ue{-125.0, -111.4, 0.8};
    const double a = sinr_db(ue, 10.0, cfg_with(16), -108.0);
    const double b = sinr_db(ue, 13.0, cfg_with(16), -108.0);
    EXPECT_NEAR(b - a, 3.0, 1e-12);
}

TEST(Sinr, DoublingInterferenceCostsThreeDb)
{
    UeChannel ue{-110.0, -200.0, 1.0}; // noise far below interference
    const double a = sinr_db(ue, 10.0, cfg_with(8), -80.0);
    const double b = sinr_db(ue, 10.0, cfg_with(8), -80.0 + 10.0 * std::log10(2.0));
    EXPECT_NEAR(a - b, 10.0 * std::log10(2.0), 1e-6);
}

TEST(Interference, SingleUeSeesOnlyFloor)
{
    const auto cs = testing::default_configs();
    SlotDecision d;
    d.chosen_config = 3;
    d.allocations = {alloc(0, 0, 273, 27.6)};
    InterferenceModel m;
    const auto samples = interference_per_rb(d, cs, m, 273);
    ASSERT_EQ(samples.size(), 273u);
    for (const auto& s : samples) {
        EXPECT_DOUBLE_EQ(s.dbm, m.intercell_floor_dbm_per_rb);
    }
}

TEST(Interference, AdjacentBoundaryIsFloorPlusLeakage)
{
    const auto cs = testing::default_configs();
    const double p = 20.0;
    SlotDecision d;
    d.chosen_config = 3; // 32 TRX → L = 30 dB
    d.allocations = {alloc(0, 0, 10, p), alloc(1, 10, 10, p)};
    InterferenceModel m;
    const auto samples = interference_per_rb(d, cs, m, 273);
    const double want = 10.0 * std::log10(std::pow(10.0, m.intercell_floor_dbm_per_rb / 10.0) +
                                          std::pow(10.0, (p - 30.0) / 10.0));
    EXPECT_NEAR(samples[9].dbm, want, 1e-9);
    EXPECT_NEAR(samples[10].dbm, want, 1e-9);
    // one RB further away the leakage is slope·1 dB weaker
    const double want1 = 10.0 * std::log10(std::pow(10.0, m.intercell_floor_dbm_per_rb / 10.0) +
                                           std::pow(10.0, (p - 30.0 - 3.0) / 10.0));
    EXPECT_NEAR(samples[8].dbm, want1, 1e-9);
}

TEST(Interference, FewerTrxLeakMore)
{
    const auto cs = testing::default_configs();
    SlotDecision d;
    d.allocations = {alloc(0, 0, 10, 20.0), alloc(1, 10, 10, 20.0)};
    InterferenceModel m;
    d.chosen_config = 3;
    const double at32 = interference_per_rb(d, cs, m, 273)[10].dbm;
    d.chosen_config = 1;
    const double at8 = interference_per_rb(d, cs, m, 273)[10].dbm;
    EXPECT_GT(at8, at32);
}

TEST(Interference, OverlapIsContractViolation)
{
    const auto cs = testing::default_configs();
    SlotDecision d;
    d.chosen_config = 3;
    d.allocations = {alloc(0, 0, 10, 20.0), alloc(1, 5, 10, 20.0)};
    EXPECT_THROW((void)interference_per_rb(d, cs, InterferenceModel{}, 273), ContractViolation);
}

TEST(Leakage, BeyondMaxDistanceIsSilent)
{
    const auto leak = leakage_per_rb({alloc(0, 0, 5, 20.0), alloc(1, 20, 5, 20.0)}, 273, 30.0, 3.0, 8);
    for (int b = 0; b < 273; ++b) {
        EXPECT_EQ(leak[static_cast<std::size_t>(b)], kNegInfDb) << b;
    }
}

TEST(Csi, ReportMatchesClosedFormAndRoundTrips)
{
    const auto cs = testing::default_configs();
    UeChannel ue{-130.0, -111.4, 1.0};
    for (const auto& c : cs.all()) {
        const double psd = c.reference_psd_dbm(273);
        const auto r = wideband_csi(3, ue, c, psd, -110.0);
        EXPECT_EQ(r.config_id, c.id);
        EXPECT_NEAR(r.gamma_db, sinr_db(ue, psd, c, -110.0), 1e-12);
        EXPECT_NEAR(r.gamma_at_psd_db(psd), r.gamma_db, 1e-9);
        EXPECT_NEAR(r.gamma_at_psd_db(psd - 3.0), r.gamma_db - 3.0, 1e-9);
    }
}

TEST(ConfigSetTest, PowerAndOverheadScaleWithTrx)
{
    const auto cs = testing::default_configs();
    ASSERT_EQ(cs.size(), 3);
    EXPECT_NEAR(cs.at(3).max_power_dbm, 52.0, 1e-12);
    EXPECT_NEAR(cs.at(1).max_power_dbm, 52.0 - 10.0 * std::log10(4.0), 1e-12);
    EXPECT_EQ(cs.at(1).csi_overhead_rbs, 1);
    EXPECT_EQ(cs.at(2).csi_overhead_rbs, 2);
    EXPECT_EQ(cs.at(3).csi_overhead_rbs, 4);
    EXPECT_THROW((void)cs.at(4), DomainError);
}

} // namespace
} // namespace nessim
