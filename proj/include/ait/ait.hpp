/*
 * Copyright 2026 The ait Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef AIT_AIT_HPP_
#define AIT_AIT_HPP_

#include "ait/attribution.hpp"
#include "ait/causal.hpp"
#include "ait/deficiency.hpp"
#include "ait/error.hpp"
#include "ait/experiments.hpp"
#include "ait/it_scores.hpp"
#include "ait/lzc.hpp"
#include "ait/model_io.hpp"
#include "ait/observation_csv.hpp"
#include "ait/stat_tests.hpp"

#endif  // AIT_AIT_HPP_
