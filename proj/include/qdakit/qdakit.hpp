// Copyright 2026 The qdakit Authors.
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

#include "qdakit/coding.hpp"
#include "qdakit/corpus.hpp"
#include "qdakit/error.hpp"
#include "qdakit/graph.hpp"
#include "qdakit/graph_io.hpp"
#include "qdakit/lexicon.hpp"
#include "qdakit/matrix.hpp"
#include "qdakit/pipeline.hpp"
#include "qdakit/project_store.hpp"
#include "qdakit/resources.hpp"
#include "qdakit/review_service.hpp"
#include "qdakit/stats.hpp"
#include "qdakit/synthetic.hpp"
#include "qdakit/text.hpp"
