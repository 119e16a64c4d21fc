#pragma once

#include "constants.hpp"
#include "error.hpp"
#include "parallel.hpp"

#include "basegrid.hpp"
#include "chainkit.hpp"
#include "charclass.hpp"
#include "famtor.hpp"
#include "genfront.hpp"
#include "tubefun.hpp"

#include "io.hpp"
