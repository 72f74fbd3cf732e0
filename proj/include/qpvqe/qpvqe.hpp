// Copyright 2026 The QP-VQE Authors. All Rights Reserved.
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

#include "qpvqe/pauli.hpp"
#include "qpvqe/statevector.hpp"
#include "qpvqe/fermion.hpp"
#include "qpvqe/ansatz.hpp"
#include "qpvqe/state_prep.hpp"
#include "qpvqe/driver.hpp"
#include "qpvqe/observables.hpp"
#include "qpvqe/noise.hpp"
#include "qpvqe/hamiltonian_io.hpp"
#include "qpvqe/exact.hpp"
#include "qpvqe/harness.hpp"
