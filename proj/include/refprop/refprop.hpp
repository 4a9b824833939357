#pragma once

// Umbrella header for the refprop library.

#include "refprop/applications.hpp"
#include "refprop/category.hpp"
#include "refprop/corpus.hpp"
#include "refprop/errors.hpp"
#include "refprop/evaluation.hpp"
#include "refprop/manual_scorer.hpp"
#include "refprop/maxent.hpp"
#include "refprop/pipeline.hpp"
#include "refprop/rules.hpp"
