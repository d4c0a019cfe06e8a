/**
 * This code is part of iondet.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include "iondet/harness/config.hpp"
#include "iondet/harness/output.hpp"
#include "iondet/harness/scenarios.hpp"
