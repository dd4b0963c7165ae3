#pragma once

#include "cwlab/certificate.hpp"
#include "cwlab/compiler.hpp"
#include "cwlab/error.hpp"
#include "cwlab/exact.hpp"
#include "cwlab/expr.hpp"
#include "cwlab/graph.hpp"
#include "cwlab/vertex_minor.hpp"
#include "cwlab/word.hpp"
