#pragma once

// Everything in one include.

#include "tropdiv/scalar.hpp"
#include "tropdiv/linprog.hpp"
#include "tropdiv/tropical.hpp"
#include "tropdiv/polyhedral.hpp"
#include "tropdiv/division.hpp"
#include "tropdiv/exact_division.hpp"
#include "tropdiv/newton.hpp"
#include "tropdiv/approx_division.hpp"
#include "tropdiv/composite.hpp"
#include "tropdiv/network.hpp"
#include "tropdiv/json_io.hpp"
#include "tropdiv/compress.hpp"
