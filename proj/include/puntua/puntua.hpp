#pragma once

#include "puntua/align.hpp"
#include "puntua/consolidate.hpp"
#include "puntua/heuristics.hpp"
#include "puntua/jsonl.hpp"
#include "puntua/llm.hpp"
#include "puntua/metrics.hpp"
#include "puntua/pipeline.hpp"
#include "puntua/prompt.hpp"
#include "puntua/rules.hpp"
#include "puntua/text.hpp"
#include "puntua/types.hpp"
