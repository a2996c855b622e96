// Copyright 2026 The convaug Authors
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

#pragma once

#include "convaug/augment.hpp"
#include "convaug/augment_config.hpp"
#include "convaug/core/error.hpp"
#include "convaug/core/image.hpp"
#include "convaug/core/image_io.hpp"
#include "convaug/core/rng.hpp"
#include "convaug/core/tensor_blob.hpp"
#include "convaug/core/text.hpp"
#include "convaug/job.hpp"
#include "convaug/manifest.hpp"
#include "convaug/metrics.hpp"
#include "convaug/pca_fit.hpp"
#include "convaug/preprocess.hpp"
#include "convaug/scoring.hpp"
