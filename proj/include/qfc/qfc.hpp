// Copyright 2026 The QFC Authors
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


#ifndef QFC_QFC_HPP
#define QFC_QFC_HPP

#include "qfc/core/linalg.hpp"
#include "qfc/core/random_states.hpp"
#include "qfc/core/spin.hpp"
#include "qfc/core/state.hpp"
#include "qfc/stochastic/ensemble.hpp"
#include "qfc/stochastic/rng.hpp"
#include "qfc/stochastic/sde.hpp"
#include "qfc/measurement/measurement.hpp"
#include "qfc/sme/integrator.hpp"
#include "qfc/sme/model.hpp"
#include "qfc/sme/superoperators.hpp"
#include "qfc/protocols/entanglement.hpp"
#include "qfc/protocols/purification.hpp"
#include "qfc/protocols/stabilization.hpp"
#include "qfc/chaos/julia.hpp"
#include "qfc/chaos/lyapunov.hpp"
#include "qfc/chaos/riemann.hpp"
#include "qfc/chaos/smap.hpp"
#include "qfc/io/csv.hpp"
#include "qfc/harness/config.hpp"
#include "qfc/harness/run.hpp"

#endif // QFC_QFC_HPP
