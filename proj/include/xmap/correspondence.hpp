#ifndef XMAP_CORRESPONDENCE_HPP
#define XMAP_CORRESPONDENCE_HPP

#include <string>
#include <vector>

#include "xmap/schema.hpp"

namespace xmap {

// Tag group on the target-role schema; members are element nodes that share
// one parent edge set and substructure.
struct Box {
    std::string name;
    std::vector<NodeIndex> members;
};

struct ArrowEndpoint {
    NodeIndex node = -1;
    EdgeIndex via = -1; // resolved incoming edge; -1 when unique or root
};

struct Arrow {
    ArrowEndpoint source;
    bool to_box = false;
    int box = -1;        // index into CorrespondenceSet::boxes
    ArrowEndpoint target; // unused when to_box
};

struct CorrespondenceSet {
    const DtdGraph* source = nullptr;
    const DtdGraph* target = nullptr;
    std::vector<Arrow> arrows;
    std::vector<Box> boxes;

    // Box-shared attribute canonicalization: attributes of non-representative
    // box members map onto the first member's attribute of the same name.
    NodeIndex canonical_target(NodeIndex n) const;
    int box_of(NodeIndex n) const; // box index containing element n, or -1
};

// Lines: `ARROW src/path -> tgt/path [VIA srcParent/child ~ tgtParent/child]`,
// `BOX name = {tag, tag, ...}`, `ARROW src/path -> BOX name`, '#' comments.
CorrespondenceSet parse_correspondences(const std::string& text, const DtdGraph& source,
                                        const DtdGraph& target);

} // namespace xmap

#endif
