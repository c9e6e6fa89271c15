// Copyright 2026 The bfnlab Authors
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

#pragma once

#include "bfnlab/bits.hpp"
#include "bfnlab/corpus.hpp"
#include "bfnlab/cube.hpp"
#include "bfnlab/deviation.hpp"
#include "bfnlab/dyadic.hpp"
#include "bfnlab/hypergraph.hpp"
#include "bfnlab/io.hpp"
#include "bfnlab/oracle.hpp"
#include "bfnlab/parallel.hpp"
#include "bfnlab/rng.hpp"
#include "bfnlab/sparse_junta.hpp"
#include "bfnlab/valueset.hpp"
