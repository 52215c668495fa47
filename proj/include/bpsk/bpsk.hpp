#pragma once

#include "bpsk/closed_forms.hpp"
#include "bpsk/commands.hpp"
#include "bpsk/csv.hpp"
#include "bpsk/errors.hpp"
#include "bpsk/fock_oracle.hpp"
#include "bpsk/gaussian_algebra.hpp"
#include "bpsk/montecarlo.hpp"
#include "bpsk/optimizer.hpp"
#include "bpsk/receivers.hpp"
#include "bpsk/svg_plot.hpp"
#include "bpsk/types.hpp"
