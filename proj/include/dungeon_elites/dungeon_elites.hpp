#pragma once

#include "analysis.hpp"
#include "archive.hpp"
#include "decoder.hpp"
#include "errors.hpp"
#include "evolution.hpp"
#include "experiment.hpp"
#include "fitness.hpp"
#include "level_io.hpp"
#include "model.hpp"
#include "render.hpp"
#include "rng.hpp"
#include "validate.hpp"
