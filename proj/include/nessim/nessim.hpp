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

#ifndef NESSIM_NESSIM_HPP
#define NESSIM_NESSIM_HPP

#include "nessim/channel.hpp"
#include "nessim/common.hpp"
#include "nessim/config.hpp"
#include "nessim/engine.hpp"
#include "nessim/export.hpp"
#include "nessim/kpi.hpp"
#include "nessim/mcs.hpp"
#include "nessim/power.hpp"
#include "nessim/rng.hpp"
#include "nessim/scheduler.hpp"
#include "nessim/traffic.hpp"
#include "nessim/types.hpp"

#endif // NESSIM_NESSIM_HPP
