#pragma once

#include "aniso/balance.hpp"
#include "aniso/boundary.hpp"
#include "aniso/dissipation.hpp"
#include "aniso/errors.hpp"
#include "aniso/io.hpp"
#include "aniso/kinetics.hpp"
#include "aniso/ldp.hpp"
#include "aniso/linalg.hpp"
#include "aniso/macro.hpp"
#include "aniso/micro_sim.hpp"
#include "aniso/network.hpp"
#include "aniso/om_mft.hpp"
#include "aniso/quasipotential.hpp"
#include "aniso/report.hpp"
#include "aniso/rng.hpp"
#include "aniso/simplex.hpp"
#include "aniso/trajectory.hpp"
#include "aniso/unimolecular.hpp"
