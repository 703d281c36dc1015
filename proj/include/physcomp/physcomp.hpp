#pragma once

#include "physcomp/errors.hpp"
#include "physcomp/numerics.hpp"
#include "physcomp/classical.hpp"
#include "physcomp/tape.hpp"
#include "physcomp/program.hpp"
#include "physcomp/timed.hpp"
#include "physcomp/interpreter.hpp"
#include "physcomp/advice.hpp"
#include "physcomp/model.hpp"
#include "physcomp/gallery.hpp"
#include "physcomp/dsl.hpp"
