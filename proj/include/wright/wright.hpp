#pragma once

#include "model.hpp"
#include "parser.hpp"
#include "static_analyzer.hpp"
#include "alphabet.hpp"
#include "transform.hpp"
#include "csp.hpp"
#include "codegen.hpp"
#include "engine.hpp"
#include "pipeline.hpp"
