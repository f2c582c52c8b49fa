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

#pragma once

#include "irsbc/common.hpp"
#include "irsbc/geometry.hpp"
#include "irsbc/signal_model.hpp"
#include "irsbc/sdp.hpp"
#include "irsbc/alignment.hpp"
#include "irsbc/mm.hpp"
#include "irsbc/power.hpp"
#include "irsbc/benchmarks.hpp"
#include "irsbc/experiment.hpp"
