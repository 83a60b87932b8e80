// Copyright 2026 The trajdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "trajdp/error.hpp"
#include "trajdp/inference.hpp"
#include "trajdp/prefix_tree.hpp"
#include "trajdp/privacy.hpp"
#include "trajdp/random.hpp"
#include "trajdp/release.hpp"
#include "trajdp/sanitizer.hpp"
#include "trajdp/synth.hpp"
#include "trajdp/trajectory.hpp"
#include "trajdp/utility.hpp"
