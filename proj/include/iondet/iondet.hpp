/**
 * This code is part of iondet.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include "iondet/core.hpp"
#include "iondet/detect_false.hpp"
#include "iondet/detect_ineff.hpp"
#include "iondet/errors.hpp"
#include "iondet/joint_sim.hpp"
#include "iondet/metrics.hpp"
#include "iondet/rng.hpp"
#include "iondet/spectral.hpp"
#include "iondet/version.hpp"
