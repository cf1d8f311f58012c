#pragma once

// Umbrella header for the geomorph library.

#include "geomorph/errors.hpp"
#include "geomorph/jet.hpp"
#include "geomorph/fields.hpp"
#include "geomorph/kernel.hpp"
#include "geomorph/morphism.hpp"
#include "geomorph/foliation.hpp"
#include "geomorph/sampling.hpp"
#include "geomorph/constructors.hpp"
#include "geomorph/gallery.hpp"
#include "geomorph/report.hpp"
#include "geomorph/runner.hpp"
