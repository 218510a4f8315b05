#include "xmap/groups.hpp"

#include <algorithm>
#include <functional>

namespace xmap {

namespace {

struct Walker {
    const DtdGraph& g;
    const std::vector<Box>& boxes;

    int box_of(NodeIndex n) const {
        for (size_t i = 0; i < boxes.size(); ++i)
            if (std::count(boxes[i].members.begin(), boxes[i].members.end(), n))
                return static_cast<int>(i);
        return -1;
    }

    // Out edges of an occurrence; for a box occurrence this is the first
    // member's edges with same-named attributes of other members collapsed.
    std::vector<EdgeIndex> occ_out(NodeIndex node, int box) const {
        if (box < 0) return g.out[static_cast<size_t>(node)];
        return g.out[static_cast<size_t>(boxes[static_cast<size_t>(box)].members[0])];
    }
};

// A stop found below P: the access chain of edges from P down to the stop.
struct Stop {
    std::vector<EdgeIndex> chain; // edges P -> ... -> stop node
    NodeIndex node = -1;
    int box = -1; // >= 0 when the box itself is the stop
};

bool multi_valued(Cardinality c) { return c == Cardinality::Star || c == Cardinality::Plus; }

// Step 2: follow every outgoing path from P, stopping at the first */+ edge.
std::vector<Stop> find_stops(const Walker& w, NodeIndex p_node, int p_box) {
    std::vector<Stop> stops;
    std::vector<EdgeIndex> chain;
    std::function<void(NodeIndex, int)> walk = [&](NodeIndex n, int box) {
        for (EdgeIndex e : w.occ_out(n, box)) {
            const DtdEdge& ed = w.g.edge(e);
            chain.push_back(e);
            if (multi_valued(ed.card)) {
                Stop s;
                s.chain = chain;
                s.node = ed.child;
                stops.push_back(std::move(s));
            } else {
                walk(ed.child, w.box_of(ed.child));
            }
            chain.pop_back();
        }
    };
    walk(p_node, p_box);

    // Multiple starred edges into one box collapse into a single box stop.
    for (size_t b = 0; b < w.boxes.size(); ++b) {
        std::vector<size_t> hits;
        for (size_t i = 0; i < stops.size(); ++i)
            if (stops[i].box < 0 && w.box_of(stops[i].node) == static_cast<int>(b)) hits.push_back(i);
        if (hits.size() < 2) continue;
        Stop merged = stops[hits[0]];
        merged.box = static_cast<int>(b);
        std::vector<Stop> next;
        bool placed = false;
        for (size_t i = 0; i < stops.size(); ++i) {
            if (std::count(hits.begin(), hits.end(), i)) {
                if (!placed) {
                    next.push_back(merged);
                    placed = true;
                }
            } else {
                next.push_back(stops[i]);
            }
        }
        stops = std::move(next);
    }
    return stops;
}

struct Builder {
    const Walker& w;
    std::vector<Group> groups;
    std::set<NodeIndex> covered;

    void cover(NodeIndex node, int box) {
        if (box >= 0) {
            for (NodeIndex b : w.boxes[static_cast<size_t>(box)].members) covered.insert(b);
            return;
        }
        covered.insert(node);
        const DtdNode& n = w.g.node(node);
        if (n.is_attribute) {
            // An attribute of a box representative stands for the same-named
            // attribute of every member.
            int ob = w.box_of(n.owner);
            if (ob >= 0)
                for (NodeIndex m : w.boxes[static_cast<size_t>(ob)].members) {
                    NodeIndex a = w.g.find_attribute(m, n.tag);
                    if (a >= 0) covered.insert(a);
                }
        }
    }

    // Adds a member occurrence and walks all descendants beneath it.
    int add_subtree(Group& grp, NodeIndex node, int box, EdgeIndex in_edge, int parent) {
        GroupMember m;
        m.node = box >= 0 ? -1 : node;
        m.box = box;
        m.in_edge = in_edge;
        m.parent = parent;
        int idx = static_cast<int>(grp.members.size());
        grp.members.push_back(m);
        if (parent >= 0) grp.members[static_cast<size_t>(parent)].children.push_back(idx);
        cover(node, box);
        for (EdgeIndex e : w.occ_out(node, box)) add_subtree(grp, w.g.edge(e).child, -1, e, idx);
        return idx;
    }

    // Builds the root-to-tip spine, then hangs the tip's subtree off its end.
    void emit_group(const std::vector<EdgeIndex>& spine, int tip_box) {
        Group grp;
        if (spine.empty()) {
            add_subtree(grp, w.g.root, tip_box, -1, -1);
            groups.push_back(std::move(grp));
            return;
        }
        GroupMember rootm;
        rootm.node = w.g.root;
        grp.members.push_back(rootm);
        covered.insert(w.g.root);
        int parent = 0;
        for (size_t i = 0; i < spine.size(); ++i) {
            EdgeIndex e = spine[i];
            NodeIndex child = w.g.edge(e).child;
            if (i + 1 == spine.size()) {
                add_subtree(grp, child, tip_box, e, parent);
            } else {
                GroupMember m;
                m.node = child;
                m.in_edge = e;
                m.parent = parent;
                int idx = static_cast<int>(grp.members.size());
                grp.members.push_back(m);
                grp.members[static_cast<size_t>(parent)].children.push_back(idx);
                covered.insert(child);
                parent = idx;
            }
        }
        groups.push_back(std::move(grp));
    }

    // Steps 2-3, recursively. `path` is the edge chain root -> P.
    void process(NodeIndex p_node, int p_box, const std::vector<EdgeIndex>& path) {
        std::vector<Stop> stops = find_stops(w, p_node, p_box);
        if (stops.size() <= 1) {
            emit_group(path, p_box);
            return;
        }
        for (const Stop& s : stops) {
            std::vector<EdgeIndex> spath = path;
            spath.insert(spath.end(), s.chain.begin(), s.chain.end());
            size_t outs = w.occ_out(s.node, s.box).size();
            if (outs > 1) {
                process(s.node, s.box, spath);
            } else {
                emit_group(spath, s.box);
            }
        }
    }
};

std::string first_root_path_spine(const DtdGraph& g, NodeIndex n, std::vector<EdgeIndex>& out_edges);

// Canonical first root path (declaration-order DFS) to a node, as edges.
bool find_first_path(const DtdGraph& g, NodeIndex cur, NodeIndex goal, std::vector<EdgeIndex>& acc) {
    if (cur == goal) return true;
    for (EdgeIndex e : g.out[static_cast<size_t>(cur)]) {
        acc.push_back(e);
        if (find_first_path(g, g.edge(e).child, goal, acc)) return true;
        acc.pop_back();
    }
    return false;
}

} // namespace

std::set<std::string> Group::qualified_set() const {
    std::set<std::string> out;
    for (const auto& [_, name] : qualified) {
        // Box occurrences carry a comma-joined member list.
        size_t start = 0;
        while (true) {
            size_t comma = name.find(',', start);
            if (comma == std::string::npos) {
                out.insert(name.substr(start));
                break;
            }
            out.insert(name.substr(start, comma - start));
            start = comma + 1;
        }
    }
    return out;
}

bool Group::contains_node(NodeIndex n) const {
    for (const auto& m : members)
        if (m.node == n) return true;
    return false;
}

bool Group::contains_box(int box) const {
    for (const auto& m : members)
        if (m.box == box && box >= 0) return true;
    return false;
}

std::map<std::string, int> valued_leaf_tag_counts(const DtdGraph& g, const std::vector<Box>& boxes) {
    std::map<std::string, int> counts;
    auto box_of = [&](NodeIndex n) {
        for (size_t i = 0; i < boxes.size(); ++i)
            if (std::count(boxes[i].members.begin(), boxes[i].members.end(), n))
                return static_cast<int>(i);
        return -1;
    };
    // Edge-based occurrences; edges from non-representative box members are
    // skipped so box-shared children count once.
    for (const DtdEdge& e : g.edges) {
        const DtdNode& c = g.node(e.child);
        if (c.is_attribute || !c.valued) continue;
        int pb = box_of(e.parent);
        if (pb >= 0 && boxes[static_cast<size_t>(pb)].members[0] != e.parent) continue;
        counts[c.tag]++;
    }
    return counts;
}

namespace {

void qualify(const DtdGraph& g, const std::vector<Box>& boxes, std::vector<Group>& groups,
             const std::map<std::string, int>* partner_counts) {
    std::map<std::string, int> counts = valued_leaf_tag_counts(g, boxes);
    if (partner_counts)
        for (const auto& [tag, n] : *partner_counts) counts[tag] += n;

    for (Group& grp : groups) {
        for (size_t i = 0; i < grp.members.size(); ++i) {
            const GroupMember& m = grp.members[i];
            if (m.box >= 0) {
                // A box occurrence displays every member tag.
                std::string joined;
                for (NodeIndex b : boxes[static_cast<size_t>(m.box)].members) {
                    if (!joined.empty()) joined += ",";
                    joined += g.node(b).tag;
                }
                grp.qualified[static_cast<int>(i)] = joined;
                continue;
            }
            const DtdNode& n = g.node(m.node);
            if (n.is_attribute) {
                grp.qualified[static_cast<int>(i)] = "@" + n.tag;
                continue;
            }
            bool leaf = n.valued;
            auto it = counts.find(n.tag);
            if (!leaf || it == counts.end() || it->second < 2 || m.parent < 0) {
                grp.qualified[static_cast<int>(i)] = n.tag;
                continue;
            }
            // Qualified: first letter of the parent tag, or the full parent
            // tag when a sibling element's tag starts with that same letter.
            const GroupMember& pm = grp.members[static_cast<size_t>(m.parent)];
            std::string ptag = pm.box >= 0 ? boxes[static_cast<size_t>(pm.box)].name
                                           : g.node(pm.node).tag;
            NodeIndex pnode = pm.box >= 0 ? boxes[static_cast<size_t>(pm.box)].members[0] : pm.node;
            char letter = ptag[0];
            bool collide = false;
            for (EdgeIndex e : g.out[static_cast<size_t>(pnode)]) {
                const DtdNode& sib = g.node(g.edge(e).child);
                if (sib.is_attribute || sib.tag == n.tag) continue;
                if (!sib.tag.empty() && sib.tag[0] == letter) collide = true;
            }
            grp.qualified[static_cast<int>(i)] =
                collide ? ptag + "_" + n.tag : std::string(1, letter) + n.tag;
        }
    }
}

} // namespace

std::vector<Group> detect_groups(const DtdGraph& g, const std::vector<Box>& boxes,
                                 const std::map<std::string, int>* partner_counts) {
    Walker w{g, boxes};
    Builder b{w, {}, {}};

    // Step 1: find the first node with multiple outgoing edges.
    NodeIndex p = g.root;
    std::vector<EdgeIndex> path;
    while (true) {
        int pbox = w.box_of(p);
        auto outs = w.occ_out(p, pbox >= 0 ? pbox : -1);
        if (outs.size() > 1) break;
        if (outs.empty()) {
            // Single chain, no branching: everything is one group.
            b.emit_group({}, -1);
            qualify(g, boxes, b.groups, partner_counts);
            for (size_t i = 0; i < b.groups.size(); ++i) b.groups[i].id = "g" + std::to_string(i + 1);
            return b.groups;
        }
        path.push_back(outs[0]);
        p = g.edge(outs[0]).child;
    }
    b.process(p, w.box_of(p), path);

    // Step 4: leftover nodes and their ancestors form one final group.
    std::vector<NodeIndex> rest;
    for (size_t i = 0; i < g.nodes.size(); ++i)
        if (!b.covered.count(static_cast<NodeIndex>(i))) rest.push_back(static_cast<NodeIndex>(i));
    if (!rest.empty()) {
        Group grp;
        GroupMember rootm;
        rootm.node = g.root;
        grp.members.push_back(rootm);
        // occurrence index by edge chain endpoint: map node -> member index of
        // the first placed occurrence along its canonical path
        std::map<NodeIndex, int> placed{{g.root, 0}};
        for (NodeIndex n : rest) {
            std::vector<EdgeIndex> acc;
            if (!find_first_path(g, g.root, n, acc))
                throw DisconnectedGroup("leftover node unreachable from root: " + g.node(n).tag);
            int parent = 0;
            NodeIndex cur = g.root;
            for (EdgeIndex e : acc) {
                cur = g.edge(e).child;
                auto it = placed.find(cur);
                if (it != placed.end()) {
                    parent = it->second;
                    continue;
                }
                GroupMember m;
                m.node = cur;
                m.in_edge = e;
                m.parent = parent;
                int idx = static_cast<int>(grp.members.size());
                grp.members.push_back(m);
                grp.members[static_cast<size_t>(parent)].children.push_back(idx);
                placed[cur] = idx;
                parent = idx;
            }
        }
        b.groups.push_back(std::move(grp));
    }

    qualify(g, boxes, b.groups, partner_counts);
    for (size_t i = 0; i < b.groups.size(); ++i) b.groups[i].id = "g" + std::to_string(i + 1);
    return b.groups;
}

std::vector<std::pair<int, int>> connected_pairs(const CorrespondenceSet& corr,
                                                 const std::vector<Group>& src_groups,
                                                 const std::vector<Group>& tgt_groups) {
    std::vector<std::pair<int, int>> pairs;
    auto add = [&](int s, int t) {
        if (!std::count(pairs.begin(), pairs.end(), std::make_pair(s, t))) pairs.emplace_back(s, t);
    };
    for (const Arrow& a : corr.arrows) {
        for (size_t s = 0; s < src_groups.size(); ++s) {
            if (!src_groups[s].contains_node(a.source.node)) continue;
            for (size_t t = 0; t < tgt_groups.size(); ++t) {
                const Group& tg = tgt_groups[t];
                bool hit = false;
                if (a.to_box) {
                    hit = tg.contains_box(a.box);
                    if (!hit)
                        for (NodeIndex m : corr.boxes[static_cast<size_t>(a.box)].members)
                            if (tg.contains_node(m)) hit = true;
                } else {
                    hit = tg.contains_node(a.target.node);
                    if (!hit && corr.target->node(a.target.node).is_attribute) {
                        // Box-shared attribute: any member's copy counts.
                        NodeIndex owner = corr.target->node(a.target.node).owner;
                        int box = corr.box_of(owner);
                        if (box >= 0 && tg.contains_box(box)) hit = true;
                    }
                }
                if (hit) add(static_cast<int>(s), static_cast<int>(t));
            }
        }
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

} // namespace xmap
