// Copyright 2026 The clusterdiff Authors
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

#ifndef CLUSTERDIFF_CLUSTERDIFF_HPP
#define CLUSTERDIFF_CLUSTERDIFF_HPP

#include <clusterdiff/core.hpp>
#include <clusterdiff/delta_recall.hpp>
#include <clusterdiff/errors.hpp>
#include <clusterdiff/impact.hpp>
#include <clusterdiff/iq.hpp>
#include <clusterdiff/quality.hpp>
#include <clusterdiff/report.hpp>
#include <clusterdiff/simulation.hpp>
#include <clusterdiff/snapshot.hpp>

#endif  // CLUSTERDIFF_CLUSTERDIFF_HPP
