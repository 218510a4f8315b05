#ifndef XMAP_GROUPS_HPP
#define XMAP_GROUPS_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "xmap/correspondence.hpp"
#include "xmap/schema.hpp"

namespace xmap {

// One occurrence of a schema node inside a group. Groups walk the DAG
// top-down, so shared nodes appear once per access path (the replication of
// §3.2 falls out of this). A boxed stop collapses the members into a single
// occurrence carrying the box index.
struct GroupMember {
    NodeIndex node = -1;   // -1 for a box occurrence
    int box = -1;          // box index when this occurrence is a collapsed box
    EdgeIndex in_edge = -1;
    int parent = -1;       // index into Group::members; -1 at the occurrence root
    std::vector<int> children;
};

struct Group {
    std::string id; // g1, g2, ... in traversal order
    std::vector<GroupMember> members; // members[0] is the schema root occurrence
    std::map<int, std::string> qualified; // member index -> display name

    std::set<std::string> qualified_set() const;
    bool contains_node(NodeIndex n) const;
    bool contains_box(int box) const;
};

// Multiset of valued-element-leaf tags, used to count tag occurrences across
// a schema pair when qualifying display names.
std::map<std::string, int> valued_leaf_tag_counts(const DtdGraph& g, const std::vector<Box>& boxes);

// Group detection. Boxes (declared in a correspondence file against this
// schema in the target role) refine step 2; partner_counts supplies the other
// schema's leaf-tag counts for pair-context display names.
std::vector<Group> detect_groups(const DtdGraph& g, const std::vector<Box>& boxes = {},
                                 const std::map<std::string, int>* partner_counts = nullptr);

// (source group, target group) index pairs joined by at least one arrow.
std::vector<std::pair<int, int>> connected_pairs(const CorrespondenceSet& corr,
                                                 const std::vector<Group>& src_groups,
                                                 const std::vector<Group>& tgt_groups);

} // namespace xmap

#endif
