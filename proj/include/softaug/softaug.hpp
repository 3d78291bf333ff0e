// Copyright (c) 2026, The softaug Authors. All rights reserved.
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

#include "softaug/config.hpp"
#include "softaug/data.hpp"
#include "softaug/errors.hpp"
#include "softaug/experiment.hpp"
#include "softaug/geometry.hpp"
#include "softaug/image.hpp"
#include "softaug/loss.hpp"
#include "softaug/metrics.hpp"
#include "softaug/model.hpp"
#include "softaug/random.hpp"
#include "softaug/sampling.hpp"
#include "softaug/softening.hpp"
#include "softaug/ssl_weights.hpp"
#include "softaug/train.hpp"
