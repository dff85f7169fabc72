#pragma once

#include <nsgas/algorithms.hpp>
#include <nsgas/constructions.hpp>
#include <nsgas/harness.hpp>
#include <nsgas/io.hpp>
#include <nsgas/lemmas.hpp>
#include <nsgas/lp.hpp>
#include <nsgas/min_norm.hpp>
#include <nsgas/oracle.hpp>
#include <nsgas/pa_core.hpp>
#include <nsgas/polyhedron.hpp>
#include <nsgas/subdiff.hpp>
#include <nsgas/types.hpp>
