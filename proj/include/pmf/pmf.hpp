#pragma once

#include "pmf/arith.hpp"
#include "pmf/series.hpp"
#include "pmf/linalg.hpp"
#include "pmf/jacobi.hpp"
#include "pmf/theta.hpp"
#include "pmf/weak_ring.hpp"
#include "pmf/quadform.hpp"
#include "pmf/paramodular.hpp"
#include "pmf/borcherds.hpp"
#include "pmf/restriction.hpp"
#include "pmf/weight4.hpp"
#include "pmf/symplectic.hpp"
#include "pmf/trace_hecke.hpp"
#include "pmf/io.hpp"
#include "pmf/certificate.hpp"
