#pragma once

#include <random>
#include <utility>
#include <vector>

#include "dyntrap/tst.h"

namespace dyntrap {

struct AffectedNode {
    StabbedNode at;
    Piece piece;  // where the segment enters and leaves the region
};

using AffectedList = std::vector<AffectedNode>;

/// Topmost nodes with priority not below h that s stabs, left to right.
/// With h already in the tree the list holds the heads of its chains.
AffectedList find_affected(Tst& t, const Segment& s, const SegmentEntry* h, VisitStats& stats);

/// The subtrees the two halves of u's region get when cut vertically at q.
/// Consumes u; q must lie strictly inside the region's x-range.
std::pair<NodeId, NodeId> v_partition(Tst& t, NodeId u, const PointRef& q, VisitStats& stats);

/// Inverse of v_partition: the subtree of the union of two regions that
/// meet along the vertical cut through q.
NodeId v_merge(Tst& t, NodeId minus, NodeId plus, const PointRef& q, VisitStats& stats);

/// The subtrees below and above the line of c, which must cross u's region
/// from wall to wall and come first in priority. Returns (minus, plus).
std::pair<NodeId, NodeId> partition(Tst& t, NodeId u, const SegmentEntry& c, VisitStats& stats);

/// Inverse of partition: removes the edge cut of c between two regions.
NodeId merge(Tst& t, NodeId minus, NodeId plus, const SegmentEntry& c, VisitStats& stats);

/// Inserts s at a uniformly random priority position.
VisitStats insert(Tst& t, const Segment& s, std::mt19937_64& rng);
/// Inserts s at the 1-based priority position `rank`.
VisitStats insert_at(Tst& t, const Segment& s, std::size_t rank);
VisitStats erase(Tst& t, SegId id);

}  // namespace dyntrap
