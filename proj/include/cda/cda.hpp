// Copyright 2026 The cdakit Authors
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

#ifndef CDA_CDA_HPP
#define CDA_CDA_HPP

#include "cda/bias.hpp"
#include "cda/bridge.hpp"
#include "cda/corpus.hpp"
#include "cda/error.hpp"
#include "cda/intervention.hpp"
#include "cda/lexicon.hpp"
#include "cda/ngram.hpp"
#include "cda/templates.hpp"

#endif  // CDA_CDA_HPP
