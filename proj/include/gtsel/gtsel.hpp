#pragma once

#include "gtsel/apx_rank.hpp"
#include "gtsel/error.hpp"
#include "gtsel/minfind.hpp"
#include "gtsel/order.hpp"
#include "gtsel/random.hpp"
#include "gtsel/rank_test.hpp"
#include "gtsel/selection.hpp"
#include "gtsel/stats.hpp"
