#pragma once

#include "rydberg/atomic.hpp"
#include "rydberg/channel.hpp"
#include "rydberg/codec.hpp"
#include "rydberg/config.hpp"
#include "rydberg/errors.hpp"
#include "rydberg/fft.hpp"
#include "rydberg/frame_io.hpp"
#include "rydberg/image.hpp"
#include "rydberg/link.hpp"
#include "rydberg/ofdm.hpp"
#include "rydberg/orchestrator.hpp"
#include "rydberg/qam.hpp"
#include "rydberg/random.hpp"
#include "rydberg/receiver.hpp"
#include "rydberg/sweep.hpp"
