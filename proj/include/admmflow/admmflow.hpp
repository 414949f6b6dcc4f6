// Copyright 2026 The admmflow Authors
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

#ifndef ADMMFLOW_ADMMFLOW_HPP_
#define ADMMFLOW_ADMMFLOW_HPP_

#include "admmflow/analysis.hpp"
#include "admmflow/discrete.hpp"
#include "admmflow/errors.hpp"
#include "admmflow/experiment.hpp"
#include "admmflow/flows.hpp"
#include "admmflow/io.hpp"
#include "admmflow/problem.hpp"
#include "admmflow/trajectory.hpp"

#endif  // ADMMFLOW_ADMMFLOW_HPP_
