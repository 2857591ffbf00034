#pragma once

//! Graphviz rendering of a dialectic trace.
//!
//! One cluster per displayed argument; inside a cluster, arrows run from a
//! rule's body literals up to its head (rankdir=BT). Contingent literals are
//! underlined. Defeat edges carry a large arrowhead; interference is a
//! dashed double-headed edge, one per interfering pair. A justified
//! conclusion sits on a bold horizontal line.

#include "ddec/argument.hpp"

#include <string>
#include <vector>

namespace ddec {

// Pool indices shown for a trace: arguments for and against the goal, then
// their attackers, transitively. Sorted.
std::vector<std::size_t> displayed_arguments(const DialecticTrace& trace);

std::string export_dot(const DialecticTrace& trace);

}  // namespace ddec
