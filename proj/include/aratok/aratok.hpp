// Copyright 2026 The aratok Authors
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

#ifndef ARATOK_ARATOK_HPP_
#define ARATOK_ARATOK_HPP_

#include "aratok/codec.hpp"
#include "aratok/corpus.hpp"
#include "aratok/embedding.hpp"
#include "aratok/errors.hpp"
#include "aratok/experiment.hpp"
#include "aratok/lep.hpp"
#include "aratok/metrics.hpp"
#include "aratok/model.hpp"
#include "aratok/normalizer.hpp"
#include "aratok/trainer.hpp"
#include "aratok/utf8.hpp"
#include "aratok/vocab.hpp"

#endif  // ARATOK_ARATOK_HPP_
