// Copyright 2026 The mpsbench Authors
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

// Umbrella header.

#include "mpsbench/rng.hpp"
#include "mpsbench/qasm.hpp"
#include "mpsbench/linalg.hpp"
#include "mpsbench/statevector.hpp"
#include "mpsbench/circuits.hpp"
#include "mpsbench/passes.hpp"
#include "mpsbench/mps.hpp"
#include "mpsbench/harness.hpp"
#include "mpsbench/cmaes.hpp"
#include "mpsbench/tuner.hpp"
#include "mpsbench/elo.hpp"
#include "mpsbench/report.hpp"
