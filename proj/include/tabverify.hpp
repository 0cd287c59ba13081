//
// Copyright 2026 The tabverify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include "tabverify/cascade.hpp"
#include "tabverify/data_model.hpp"
#include "tabverify/error.hpp"
#include "tabverify/ingest.hpp"
#include "tabverify/metrics.hpp"
#include "tabverify/prediction.hpp"
#include "tabverify/rng.hpp"
#include "tabverify/scoring.hpp"
#include "tabverify/slices.hpp"
#include "tabverify/synth.hpp"
#include "tabverify/text.hpp"
