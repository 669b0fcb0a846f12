#pragma once

#include "scz/bench.hpp"
#include "scz/channel.hpp"
#include "scz/container.hpp"
#include "scz/error.hpp"
#include "scz/rans.hpp"
#include "scz/reshape_optimizer.hpp"
#include "scz/sparse.hpp"
#include "scz/tensor.hpp"
