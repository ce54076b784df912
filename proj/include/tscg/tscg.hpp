#pragma once
// Convenience include for the whole library.

#include "tscg/equivalence.hpp"
#include "tscg/errors.hpp"
#include "tscg/ir.hpp"
#include "tscg/lexicon.hpp"
#include "tscg/metrics.hpp"
#include "tscg/operators.hpp"
#include "tscg/pipeline.hpp"
#include "tscg/schema.hpp"
#include "tscg/tokenizer.hpp"
#include "tscg/util.hpp"
