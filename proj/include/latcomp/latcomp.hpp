#pragma once

// Core library (no I/O dependencies).
#include "latcomp/colorspace.hpp"
#include "latcomp/config.hpp"
#include "latcomp/detail_preserve.hpp"
#include "latcomp/error.hpp"
#include "latcomp/kernel.hpp"
#include "latcomp/patterns.hpp"
#include "latcomp/perception.hpp"
#include "latcomp/pipeline.hpp"
#include "latcomp/plane.hpp"
