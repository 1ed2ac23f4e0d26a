#pragma once

#include "cartanv/checks.hpp"
#include "cartanv/connections.hpp"
#include "cartanv/errors.hpp"
#include "cartanv/expr.hpp"
#include "cartanv/fiber.hpp"
#include "cartanv/frames.hpp"
#include "cartanv/geometry.hpp"
#include "cartanv/harness.hpp"
#include "cartanv/indicatrix.hpp"
#include "cartanv/jet.hpp"
#include "cartanv/liouville.hpp"
#include "cartanv/metric.hpp"
#include "cartanv/oracle.hpp"
#include "cartanv/random.hpp"
#include "cartanv/report.hpp"
#include "cartanv/residual.hpp"
#include "cartanv/subfoliation.hpp"
#include "cartanv/tensor.hpp"
#include "cartanv/zoo.hpp"
