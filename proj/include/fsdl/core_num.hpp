#pragma once

#include "fsdl/errors.hpp"
#include "fsdl/field.hpp"
#include "fsdl/grid.hpp"
#include "fsdl/linalg.hpp"
#include "fsdl/norms.hpp"
#include "fsdl/operators.hpp"
