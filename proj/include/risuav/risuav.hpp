#pragma once

#include "risuav/channel.hpp"
#include "risuav/geometry.hpp"
#include "risuav/infeasible.hpp"
#include "risuav/kinematics.hpp"
#include "risuav/pipeline.hpp"
#include "risuav/random.hpp"
#include "risuav/stage1.hpp"
#include "risuav/stage2.hpp"
#include "risuav/world.hpp"
