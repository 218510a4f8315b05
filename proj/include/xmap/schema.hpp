#ifndef XMAP_SCHEMA_HPP
#define XMAP_SCHEMA_HPP

#include <set>
#include <string>
#include <vector>

#include "xmap/errors.hpp"

namespace xmap {

enum class Cardinality { One, Optional, Star, Plus };

enum class AttrKind { Plain, Id, Idref };

using NodeIndex = int;
using EdgeIndex = int;

struct DtdNode {
    std::string tag;            // attribute names stored without the '@'
    bool is_attribute = false;
    bool valued = false;        // PCDATA leaf, or any attribute
    AttrKind attr_kind = AttrKind::Plain;
    bool attr_optional = false; // #IMPLIED
    NodeIndex owner = -1;       // attributes: the declaring element

    std::string display_tag() const { return is_attribute ? "@" + tag : tag; }
};

struct DtdEdge {
    NodeIndex parent = -1;
    NodeIndex child = -1;
    Cardinality card = Cardinality::One;
};

struct IdrefLink {
    NodeIndex ref_attr = -1; // IDREF attribute
    NodeIndex id_attr = -1;  // ID attribute
};

// Rooted DAG of element declarations plus per-element attributes.
// Element nodes are shared by tag (fan-in); attribute nodes are per owner.
struct DtdGraph {
    std::string name;
    std::vector<DtdNode> nodes;
    std::vector<DtdEdge> edges;
    NodeIndex root = -1;
    std::vector<IdrefLink> links;

    // Adjacency in canonical child order: attributes first (sorted by name),
    // then element children in declaration order.
    std::vector<std::vector<EdgeIndex>> out;
    std::vector<std::vector<EdgeIndex>> in;

    const DtdNode& node(NodeIndex i) const { return nodes[static_cast<size_t>(i)]; }
    const DtdEdge& edge(EdgeIndex e) const { return edges[static_cast<size_t>(e)]; }

    NodeIndex find_element(const std::string& tag) const;
    NodeIndex find_attribute(NodeIndex owner, const std::string& name) const;
    bool single_valued(EdgeIndex e) const {
        Cardinality c = edge(e).card;
        return c == Cardinality::One || c == Cardinality::Optional;
    }
};

// Parses the schema subset: <!ELEMENT tag (children)> with ?,*,+ cardinalities,
// (#PCDATA) leaves, EMPTY elements, <!ATTLIST tag attr (ID|IDREF|CDATA)
// (#REQUIRED|#IMPLIED)>, LINK Elem.@ref -> Elem.@id, and '#' comment lines.
DtdGraph parse_dtd(const std::string& text, const std::string& name = "");

std::string serialize_dtd(const DtdGraph& g);

bool graphs_equal(const DtdGraph& a, const DtdGraph& b);

// All downward label paths (tags, '@'-prefixed for attributes) from `from` to
// `to`; the empty label sequence is the path to self, empty set = unreachable.
std::set<std::vector<std::string>> dtd_paths(const DtdGraph& g, NodeIndex from, NodeIndex to);

} // namespace xmap

#endif
