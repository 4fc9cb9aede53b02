#pragma once

#include "civp/approximant.hpp"
#include "civp/box.hpp"
#include "civp/certificate.hpp"
#include "civp/exp_bounds.hpp"
#include "civp/interval.hpp"
#include "civp/invariant_engine.hpp"
#include "civp/oracle.hpp"
#include "civp/polynomial.hpp"
#include "civp/problem.hpp"
#include "civp/provers.hpp"
#include "civp/rational.hpp"
#include "civp/region.hpp"
#include "civp/sturm.hpp"
#include "civp/unipoly.hpp"
