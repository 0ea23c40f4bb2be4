#pragma once

#include "cpstap/analysis.hpp"
#include "cpstap/clutter_rank.hpp"
#include "cpstap/config.hpp"
#include "cpstap/csv.hpp"
#include "cpstap/dictionary.hpp"
#include "cpstap/errors.hpp"
#include "cpstap/experiment.hpp"
#include "cpstap/geometry.hpp"
#include "cpstap/rd_virtual.hpp"
#include "cpstap/seed.hpp"
#include "cpstap/signal_model.hpp"
#include "cpstap/solver.hpp"
#include "cpstap/types.hpp"
