#pragma once

#include "foedi/error.hpp"
#include "foedi/generators.hpp"
#include "foedi/graph.hpp"
#include "foedi/greedy.hpp"
#include "foedi/importance.hpp"
#include "foedi/io.hpp"
#include "foedi/kuramoto.hpp"
#include "foedi/perturbation.hpp"
#include "foedi/rng.hpp"
#include "foedi/spectral.hpp"
