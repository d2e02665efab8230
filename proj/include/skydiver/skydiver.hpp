#pragma once

#include "skydiver/accel_sim.hpp"
#include "skydiver/aprc.hpp"
#include "skydiver/cbws.hpp"
#include "skydiver/conv.hpp"
#include "skydiver/encode.hpp"
#include "skydiver/error.hpp"
#include "skydiver/experiment.hpp"
#include "skydiver/forward.hpp"
#include "skydiver/io/idx.hpp"
#include "skydiver/io/network_file.hpp"
#include "skydiver/io/report.hpp"
#include "skydiver/io/spike_trace.hpp"
#include "skydiver/lif.hpp"
#include "skydiver/network.hpp"
#include "skydiver/random.hpp"
#include "skydiver/spike_train.hpp"
#include "skydiver/stats.hpp"
#include "skydiver/topology.hpp"
