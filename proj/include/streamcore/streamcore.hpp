#pragma once

#include "streamcore/ast.hpp"
#include "streamcore/core.hpp"
#include "streamcore/diagram.hpp"
#include "streamcore/evaluator.hpp"
#include "streamcore/pacing.hpp"
#include "streamcore/parser.hpp"
#include "streamcore/semantics.hpp"
#include "streamcore/trace.hpp"
#include "streamcore/trace_io.hpp"
#include "streamcore/typecheck.hpp"
