#pragma once

#include "entasym/analytics.hpp"
#include "entasym/common.hpp"
#include "entasym/dos.hpp"
#include "entasym/eig.hpp"
#include "entasym/ensemble.hpp"
#include "entasym/entanglement.hpp"
#include "entasym/experiments.hpp"
#include "entasym/spins.hpp"
