#pragma once

#include <bitp/error.hpp>
#include <bitp/ratio.hpp>
#include <bitp/hash.hpp>
#include <bitp/dataset.hpp>
#include <bitp/predicates.hpp>
#include <bitp/fractiles.hpp>
#include <bitp/parallel.hpp>
#include <bitp/miner.hpp>
#include <bitp/sequence.hpp>
#include <bitp/metrics.hpp>
#include <bitp/synth.hpp>
#include <bitp/oracle.hpp>
#include <bitp/render.hpp>
#include <bitp/io.hpp>
