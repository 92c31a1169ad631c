// Copyright 2026 The FleetWatt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include "fleetwatt/catalog.hpp"
#include "fleetwatt/error.hpp"
#include "fleetwatt/fleet.hpp"
#include "fleetwatt/io.hpp"
#include "fleetwatt/kv_capacity.hpp"
#include "fleetwatt/model.hpp"
#include "fleetwatt/perf_model.hpp"
#include "fleetwatt/power.hpp"
#include "fleetwatt/queueing.hpp"
#include "fleetwatt/report.hpp"
#include "fleetwatt/tokenomics.hpp"
#include "fleetwatt/topology.hpp"
#include "fleetwatt/workload.hpp"
