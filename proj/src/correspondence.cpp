#include "xmap/correspondence.hpp"

#include <algorithm>
#include <sstream>

namespace xmap {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> segs;
    std::string cur;
    for (char c : path) {
        if (c == '/') {
            if (!cur.empty()) segs.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) segs.push_back(cur);
    if (segs.empty()) throw SyntaxError("empty arrow path");
    return segs;
}

// Does `anc` appear above `n` (walking any chain of in-edges)?
bool has_ancestor_chain(const DtdGraph& g, NodeIndex n, const std::vector<std::string>& segs) {
    // segs are the path segments before the final one, innermost last.
    if (segs.empty()) return true;
    std::vector<std::pair<NodeIndex, int>> stack{{n, static_cast<int>(segs.size()) - 1}};
    while (!stack.empty()) {
        auto [cur, k] = stack.back();
        stack.pop_back();
        for (EdgeIndex e : g.in[static_cast<size_t>(cur)]) {
            NodeIndex p = g.edge(e).parent;
            if (g.node(p).tag != segs[static_cast<size_t>(k)]) continue;
            if (k == 0) return true;
            stack.push_back({p, k - 1});
        }
    }
    return false;
}

struct Resolution {
    std::vector<NodeIndex> nodes; // all candidates after filtering
    EdgeIndex via = -1;           // parent edge pinned by the path, if any
};

Resolution resolve_path(const DtdGraph& g, const std::string& path) {
    auto segs = split_path(path);
    std::string last = segs.back();
    segs.pop_back();
    Resolution r;
    if (!last.empty() && last[0] == '@') {
        std::string attr = last.substr(1);
        for (size_t i = 0; i < g.nodes.size(); ++i) {
            const DtdNode& n = g.nodes[i];
            if (!n.is_attribute || n.tag != attr) continue;
            std::vector<std::string> owner_segs = segs;
            if (!owner_segs.empty()) {
                if (g.node(n.owner).tag != owner_segs.back()) continue;
                owner_segs.pop_back();
                if (!has_ancestor_chain(g, n.owner, owner_segs)) continue;
            }
            r.nodes.push_back(static_cast<NodeIndex>(i));
        }
        return r;
    }
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        const DtdNode& n = g.nodes[i];
        if (n.is_attribute || n.tag != last) continue;
        if (!has_ancestor_chain(g, static_cast<NodeIndex>(i), segs)) continue;
        NodeIndex ni = static_cast<NodeIndex>(i);
        r.nodes.push_back(ni);
        if (!segs.empty()) {
            // The path names the direct parent: pin the edge.
            for (EdgeIndex e : g.in[static_cast<size_t>(ni)])
                if (g.node(g.edge(e).parent).tag == segs.back()) r.via = e;
        }
    }
    return r;
}

EdgeIndex find_edge(const DtdGraph& g, const std::string& parent_tag, const std::string& child_tag) {
    for (size_t e = 0; e < g.edges.size(); ++e) {
        const DtdEdge& ed = g.edges[e];
        const DtdNode& c = g.node(ed.child);
        std::string ctag = c.display_tag();
        if (g.node(ed.parent).tag == parent_tag && (ctag == child_tag || c.tag == child_tag))
            return static_cast<EdgeIndex>(e);
    }
    throw UnknownNode("no edge " + parent_tag + "/" + child_tag);
}

ArrowEndpoint resolve_endpoint(const DtdGraph& g, const std::string& path, const std::string& via_spec,
                               const char* side, const CorrespondenceSet* ctx_for_boxes) {
    Resolution res = resolve_path(g, path);
    if (res.nodes.empty()) throw UnknownNode(std::string(side) + " endpoint not found: " + path);
    NodeIndex node = res.nodes[0];
    if (res.nodes.size() > 1) {
        // Allowed only when all candidates are the same-named attribute of the
        // members of one box; they collapse onto the representative.
        bool collapsible = false;
        if (ctx_for_boxes && g.nodes[static_cast<size_t>(res.nodes[0])].is_attribute) {
            for (const Box& b : ctx_for_boxes->boxes) {
                auto in_box = [&](NodeIndex a) {
                    return std::find(b.members.begin(), b.members.end(), g.node(a).owner) != b.members.end();
                };
                if (std::all_of(res.nodes.begin(), res.nodes.end(), in_box)) {
                    collapsible = true;
                    break;
                }
            }
        }
        if (!collapsible)
            throw UnknownNode(std::string(side) + " endpoint is ambiguous: " + path);
    }
    ArrowEndpoint ep;
    ep.node = node;
    ep.via = res.via;
    if (!via_spec.empty()) {
        size_t slash = via_spec.find('/');
        if (slash == std::string::npos) throw SyntaxError("malformed VIA clause: " + via_spec);
        ep.via = find_edge(g, trim(via_spec.substr(0, slash)), trim(via_spec.substr(slash + 1)));
        if (g.edge(ep.via).child != node)
            throw SyntaxError("VIA edge does not reach endpoint: " + path + " via " + via_spec);
    }
    if (ep.via < 0 && !g.node(node).is_attribute && g.in[static_cast<size_t>(node)].size() > 1)
        throw AmbiguousArrow("endpoint '" + path + "' has multiple parents; name the parent in the path or add VIA");
    return ep;
}

} // namespace

NodeIndex CorrespondenceSet::canonical_target(NodeIndex n) const {
    if (!target) return n;
    const DtdNode& nd = target->node(n);
    if (!nd.is_attribute) return n;
    for (const Box& b : boxes) {
        auto it = std::find(b.members.begin(), b.members.end(), nd.owner);
        if (it == b.members.end() || it == b.members.begin()) continue;
        NodeIndex rep = target->find_attribute(b.members[0], nd.tag);
        if (rep >= 0) return rep;
    }
    return n;
}

int CorrespondenceSet::box_of(NodeIndex n) const {
    for (size_t i = 0; i < boxes.size(); ++i)
        if (std::find(boxes[i].members.begin(), boxes[i].members.end(), n) != boxes[i].members.end())
            return static_cast<int>(i);
    return -1;
}

CorrespondenceSet parse_correspondences(const std::string& text, const DtdGraph& source,
                                        const DtdGraph& target) {
    CorrespondenceSet cs;
    cs.source = &source;
    cs.target = &target;

    std::vector<std::string> arrow_lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.rfind("BOX", 0) == 0) {
            size_t eq = t.find('=');
            if (eq == std::string::npos) throw SyntaxError("malformed BOX line: " + t);
            Box b;
            b.name = trim(t.substr(3, eq - 3));
            std::string rest = trim(t.substr(eq + 1));
            if (rest.size() < 2 || rest.front() != '{' || rest.back() != '}')
                throw SyntaxError("malformed BOX member list: " + t);
            std::istringstream members(rest.substr(1, rest.size() - 2));
            std::string m;
            while (std::getline(members, m, ',')) {
                m = trim(m);
                NodeIndex n = target.find_element(m);
                if (n < 0) throw UnknownNode("box member not in target schema: " + m);
                b.members.push_back(n);
            }
            if (b.members.empty()) throw SyntaxError("empty box: " + b.name);
            // Members must be siblings: identical parent edge sets.
            auto parent_set = [&](NodeIndex n) {
                std::set<NodeIndex> ps;
                for (EdgeIndex e : target.in[static_cast<size_t>(n)]) ps.insert(target.edge(e).parent);
                return ps;
            };
            auto first_parents = parent_set(b.members[0]);
            for (NodeIndex m2 : b.members)
                if (parent_set(m2) != first_parents)
                    throw BoxMemberNotSibling("box '" + b.name + "' members are not siblings");
            cs.boxes.push_back(std::move(b));
        } else if (t.rfind("ARROW", 0) == 0) {
            arrow_lines.push_back(t);
        } else {
            throw SyntaxError("unknown correspondence line: " + t);
        }
    }

    for (const auto& t : arrow_lines) {
        std::string body = trim(t.substr(5));
        std::string via_src, via_tgt;
        size_t via_pos = body.find(" VIA ");
        if (via_pos != std::string::npos) {
            std::string via = trim(body.substr(via_pos + 5));
            body = trim(body.substr(0, via_pos));
            size_t tilde = via.find('~');
            if (tilde == std::string::npos) throw SyntaxError("malformed VIA clause: " + t);
            via_src = trim(via.substr(0, tilde));
            via_tgt = trim(via.substr(tilde + 1));
        }
        size_t arrow = body.find("->");
        if (arrow == std::string::npos) throw SyntaxError("malformed ARROW line: " + t);
        std::string lhs = trim(body.substr(0, arrow));
        std::string rhs = trim(body.substr(arrow + 2));

        Arrow a;
        a.source = resolve_endpoint(source, lhs, via_src, "source", nullptr);
        if (rhs.rfind("BOX", 0) == 0) {
            std::string bname = trim(rhs.substr(3));
            a.to_box = true;
            a.box = -1;
            for (size_t i = 0; i < cs.boxes.size(); ++i)
                if (cs.boxes[i].name == bname) a.box = static_cast<int>(i);
            if (a.box < 0) throw UnknownNode("arrow references undeclared box: " + bname);
        } else {
            a.target = resolve_endpoint(target, rhs, via_tgt, "target", &cs);
            a.target.node = cs.canonical_target(a.target.node);
        }
        cs.arrows.push_back(a);
    }
    return cs;
}

} // namespace xmap
