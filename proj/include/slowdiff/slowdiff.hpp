#pragma once

#include "slowdiff/banded.hpp"
#include "slowdiff/config.hpp"
#include "slowdiff/dynamics.hpp"
#include "slowdiff/energy.hpp"
#include "slowdiff/ensemble.hpp"
#include "slowdiff/errors.hpp"
#include "slowdiff/experiments.hpp"
#include "slowdiff/kernel.hpp"
#include "slowdiff/mollifier.hpp"
#include "slowdiff/parallel.hpp"
#include "slowdiff/trajectory.hpp"
#include "slowdiff/transport.hpp"
#include "slowdiff/vec.hpp"
