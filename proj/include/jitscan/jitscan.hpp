/*
Copyright 2026 jitscan contributors
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
you may obtain a copy of the License at

                http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include "jitscan/chainscan.hpp"
#include "jitscan/cli_report.hpp"
#include "jitscan/config.hpp"
#include "jitscan/decoder.hpp"
#include "jitscan/detector.hpp"
#include "jitscan/region.hpp"
#include "jitscan/regionfeed.hpp"
#include "jitscan/spraygen.hpp"
#include "jitscan/version.hpp"
#include "jitscan/walk.hpp"
