/**
 * Copyright 2026 The dicke-lqg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "dicke/circuit_compiler.hpp"
#include "dicke/closed_form.hpp"
#include "dicke/errors.hpp"
#include "dicke/exact_scalar.hpp"
#include "dicke/fock_algebra.hpp"
#include "dicke/graph_io.hpp"
#include "dicke/lqg_graphs.hpp"
#include "dicke/matrix.hpp"
#include "dicke/permanent.hpp"
#include "dicke/photonic_sim.hpp"
#include "dicke/report.hpp"
#include "dicke/sculpting_engine.hpp"
