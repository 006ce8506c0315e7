/*
Copyright 2026 The sylkit Authors. All rights reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include "sylkit/audio.hpp"
#include "sylkit/dsp.hpp"
#include "sylkit/embedding.hpp"
#include "sylkit/envelopes.hpp"
#include "sylkit/error.hpp"
#include "sylkit/evaluation.hpp"
#include "sylkit/features.hpp"
#include "sylkit/fsf.hpp"
#include "sylkit/io.hpp"
#include "sylkit/pipeline.hpp"
#include "sylkit/segmentation.hpp"
#include "sylkit/textgrid.hpp"
#include "sylkit/types.hpp"
