//
// Copyright 2026 The cldp Authors
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

#include "cldp/accountant.hpp"
#include "cldp/changelog.hpp"
#include "cldp/changelog_io.hpp"
#include "cldp/errors.hpp"
#include "cldp/experiments.hpp"
#include "cldp/generator.hpp"
#include "cldp/mechanisms.hpp"
#include "cldp/oracles.hpp"
#include "cldp/random.hpp"
#include "cldp/randomized_response.hpp"
#include "cldp/release.hpp"
#include "cldp/release_io.hpp"
#include "cldp/verify_suite.hpp"
