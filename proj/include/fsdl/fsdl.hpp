#pragma once

#include "fsdl/config.hpp"
#include "fsdl/core_num.hpp"
#include "fsdl/experiment.hpp"
#include "fsdl/io.hpp"
#include "fsdl/ks1d.hpp"
#include "fsdl/ksfluid2d.hpp"
#include "fsdl/limit_lab.hpp"
#include "fsdl/monitors.hpp"
#include "fsdl/version.hpp"
