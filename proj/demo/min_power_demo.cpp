// SPDX-License-Identifier: Apache-2.0
//
// irsbc: transmit power minimization for IRS-aided backscatter links
// Copyright (C) 2026 The irsbc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// One channel draw, solved three ways: semipassive tag, a tag that powers
// its circuit from the carrier, and the monostatic closed form.

#include "irsbc/irsbc.hpp"

#include <cstdio>

int main() {
  using namespace irsbc;

  SystemLayout layout;
  layout.irs.element_count = 36;
  layout.tag_position = {20.0, 0.0};
  const ChannelSet ch = synthesize_channels(layout, PathLossModel{}, 42);

  const LinkTarget target;  // 8 dB over -110 dBm noise
  MmConfig mm;

  TagParams semipassive;
  const SolverSolution a = solve(ch, semipassive, target, mm);
  std::printf("semipassive   P* = %7.2f dBm  (no IRS %7.2f dBm, %d MM iterations)\n", watts_to_dbm(a.p_star),
              watts_to_dbm(no_irs_power(ch, semipassive, target)), a.diagnostics.iterations());

  TagParams passive;
  passive.circuit_power = dbm_to_watts(-20.0);
  passive.harvest_efficiency = 0.5;
  const SolverSolution b = solve(ch, passive, target, mm, RegimeChoice::dinkelbach);
  const CompositeLinks links = composite_links(ch, b.theta);
  TagParams operating = passive;
  operating.power_split = b.alpha;
  std::printf("passive       P* = %7.2f dBm  alpha* = %.4f  SNR = %.3f dB  harvested = %.3f dBm\n",
              watts_to_dbm(b.p_star), b.alpha, linear_to_db(received_snr(links, b.w, operating, target.noise_power)),
              watts_to_dbm(harvested_power(links, b.w, operating)));

  SystemLayout mono;
  mono.architecture = Architecture::monostatic;
  mono.ce_antennas = 1;
  mono.reader_position = mono.ce_position = {0.0, 0.0};
  mono.irs.center = {40.0, 0.0};
  mono.irs.orientation = {-1.0, 0.0};
  mono.tag_position = {20.0, 0.0};
  const ChannelSet mch = synthesize_channels(mono, PathLossModel{}, 42);
  const SolverSolution c = solve_monostatic(mch, semipassive, target);
  std::printf("monostatic    P* = %7.2f dBm  (no IRS %7.2f dBm)\n", watts_to_dbm(c.p_star),
              watts_to_dbm(no_irs_power(mch, semipassive, target)));
  return 0;
}
