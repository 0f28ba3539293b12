#ifndef DIRICHLET_LAB_HPP
#define DIRICHLET_LAB_HPP

#include "dirichlet_lab/core.hpp"
#include "dirichlet_lab/critical_loci.hpp"
#include "dirichlet_lab/critical_radius.hpp"
#include "dirichlet_lab/dirichlet.hpp"
#include "dirichlet_lab/dynamics.hpp"
#include "dirichlet_lab/enumeration.hpp"
#include "dirichlet_lab/experiments.hpp"
#include "dirichlet_lab/lattice.hpp"
#include "dirichlet_lab/lll.hpp"
#include "dirichlet_lab/norms.hpp"
#include "dirichlet_lab/parallel.hpp"
#include "dirichlet_lab/rng.hpp"

#endif  // DIRICHLET_LAB_HPP
