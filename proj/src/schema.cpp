#include "xmap/schema.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

namespace xmap {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#' || c == '-' || c == '.';
}

struct ElementDecl {
    std::string tag;
    bool pcdata = false;
    bool empty = false;
    std::vector<std::pair<std::string, Cardinality>> children;
};

struct AttrDecl {
    std::string owner;
    std::string name;
    AttrKind kind = AttrKind::Plain;
    bool optional = false;
};

struct LinkDecl {
    std::string ref_elem, ref_attr, id_elem, id_attr;
};

// Strips '#' comment lines and splits the text into '<!...>' declarations and
// LINK lines.
void scan_decls(const std::string& text, std::vector<std::string>& markup, std::vector<std::string>& links) {
    std::string stripped;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (!t.empty() && t[0] == '#') continue;
        stripped += line;
        stripped += '\n';
    }
    size_t i = 0;
    while (i < stripped.size()) {
        if (stripped[i] == '<') {
            size_t close = stripped.find('>', i);
            if (close == std::string::npos) throw SyntaxError("unterminated declaration");
            markup.push_back(stripped.substr(i, close - i + 1));
            i = close + 1;
        } else if (stripped.compare(i, 4, "LINK") == 0) {
            size_t eol = stripped.find('\n', i);
            if (eol == std::string::npos) eol = stripped.size();
            links.push_back(trim(stripped.substr(i, eol - i)));
            i = eol;
        } else if (std::isspace(static_cast<unsigned char>(stripped[i]))) {
            ++i;
        } else {
            throw SyntaxError(std::string("unexpected character '") + stripped[i] + "' in schema file");
        }
    }
}

std::vector<std::string> tokenize(const std::string& s) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (is_name_char(c)) {
            size_t j = i;
            while (j < s.size() && is_name_char(s[j])) ++j;
            out.push_back(s.substr(i, j - i));
            i = j;
        } else {
            out.push_back(std::string(1, c));
            ++i;
        }
    }
    return out;
}

ElementDecl parse_element_decl(const std::string& decl) {
    // <!ELEMENT tag (...)> | <!ELEMENT tag EMPTY>
    std::string body = trim(decl.substr(9, decl.size() - 10)); // past "<!ELEMENT", before ">"
    ElementDecl e;
    size_t sp = body.find_first_of(" \t");
    if (sp == std::string::npos) throw SyntaxError("malformed ELEMENT declaration: " + decl);
    e.tag = trim(body.substr(0, sp));
    std::string model = trim(body.substr(sp));
    if (model == "EMPTY") {
        e.empty = true;
        return e;
    }
    if (model.size() < 2 || model.front() != '(' || model.back() != ')')
        throw SyntaxError("malformed content model for element " + e.tag);
    std::string inner = model.substr(1, model.size() - 2);
    if (inner.find('|') != std::string::npos)
        throw UnsupportedConstruct("choice groups are not supported (element " + e.tag + ")");
    if (inner.find('(') != std::string::npos)
        throw UnsupportedConstruct("nested groups are not supported (element " + e.tag + ")");
    if (inner.find("#PCDATA") != std::string::npos) {
        if (trim(inner) != "#PCDATA")
            throw UnsupportedConstruct("mixed content is not supported (element " + e.tag + ")");
        e.pcdata = true;
        return e;
    }
    std::istringstream items(inner);
    std::string item;
    while (std::getline(items, item, ',')) {
        item = trim(item);
        if (item.empty()) throw SyntaxError("empty child item in element " + e.tag);
        Cardinality card = Cardinality::One;
        char last = item.back();
        if (last == '?' || last == '*' || last == '+') {
            card = last == '?' ? Cardinality::Optional : last == '*' ? Cardinality::Star : Cardinality::Plus;
            item = trim(item.substr(0, item.size() - 1));
        }
        for (char c : item)
            if (!is_name_char(c)) throw SyntaxError("bad child name '" + item + "' in element " + e.tag);
        for (const auto& [tag, _] : e.children)
            if (tag == item)
                throw UnsupportedConstruct("repeated child '" + item + "' in element " + e.tag);
        e.children.emplace_back(item, card);
    }
    return e;
}

std::vector<AttrDecl> parse_attlist_decl(const std::string& decl) {
    std::string body = trim(decl.substr(9, decl.size() - 10)); // past "<!ATTLIST"
    auto toks = tokenize(body);
    if (toks.size() < 4) throw SyntaxError("malformed ATTLIST declaration: " + decl);
    std::vector<AttrDecl> out;
    size_t i = 0;
    std::string owner = toks[i++];
    while (i < toks.size()) {
        AttrDecl a;
        a.owner = owner;
        a.name = toks[i++];
        std::string type;
        if (i < toks.size() && toks[i] == "(") {
            // (ID|IDREF|CDATA) written with parens in the spec's format
            ++i;
            if (i >= toks.size()) throw SyntaxError("malformed attribute type in " + decl);
            type = toks[i++];
            if (i < toks.size() && toks[i] == ")") ++i;
        } else if (i < toks.size()) {
            type = toks[i++];
        }
        if (type == "ID") a.kind = AttrKind::Id;
        else if (type == "IDREF") a.kind = AttrKind::Idref;
        else if (type == "CDATA") a.kind = AttrKind::Plain;
        else throw UnsupportedConstruct("attribute type '" + type + "' in " + decl);
        if (i >= toks.size() || toks[i] != "#")
            throw SyntaxError("missing #REQUIRED/#IMPLIED in " + decl);
        ++i;
        std::string req = i < toks.size() ? toks[i++] : "";
        if (req == "REQUIRED") a.optional = false;
        else if (req == "IMPLIED") a.optional = true;
        else throw SyntaxError("expected #REQUIRED or #IMPLIED in " + decl);
        out.push_back(a);
    }
    return out;
}

LinkDecl parse_link_decl(const std::string& line) {
    // LINK Elem.@ref -> Elem.@id
    auto toks = tokenize(line.substr(4));
    // Expected shape: Elem . @ ref - > Elem . @ id
    std::vector<std::string> parts;
    std::string arrowless;
    LinkDecl l;
    auto expect = [&](size_t i, const std::string& s) {
        if (i >= toks.size() || toks[i] != s) throw SyntaxError("malformed LINK directive: " + line);
    };
    if (toks.size() < 10) throw SyntaxError("malformed LINK directive: " + line);
    l.ref_elem = toks[0];
    expect(1, ".");
    expect(2, "@");
    l.ref_attr = toks[3];
    expect(4, "-");
    expect(5, ">");
    l.id_elem = toks[6];
    expect(7, ".");
    expect(8, "@");
    l.id_attr = toks[9];
    return l;
}

} // namespace

NodeIndex DtdGraph::find_element(const std::string& tag) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (!nodes[i].is_attribute && nodes[i].tag == tag) return static_cast<NodeIndex>(i);
    return -1;
}

NodeIndex DtdGraph::find_attribute(NodeIndex owner, const std::string& name) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].is_attribute && nodes[i].owner == owner && nodes[i].tag == name)
            return static_cast<NodeIndex>(i);
    return -1;
}

DtdGraph parse_dtd(const std::string& text, const std::string& name) {
    std::vector<std::string> markup, link_lines;
    scan_decls(text, markup, link_lines);

    std::vector<ElementDecl> elems;
    std::vector<AttrDecl> attrs;
    for (const auto& decl : markup) {
        if (decl.rfind("<!ELEMENT", 0) == 0) elems.push_back(parse_element_decl(decl));
        else if (decl.rfind("<!ATTLIST", 0) == 0) {
            auto batch = parse_attlist_decl(decl);
            attrs.insert(attrs.end(), batch.begin(), batch.end());
        } else throw SyntaxError("unknown declaration: " + decl);
    }
    if (elems.empty()) throw SyntaxError("schema declares no elements");

    DtdGraph g;
    std::map<std::string, NodeIndex> by_tag;
    for (const auto& e : elems) {
        if (by_tag.count(e.tag)) throw SyntaxError("element declared twice: " + e.tag);
        DtdNode n;
        n.tag = e.tag;
        n.valued = e.pcdata;
        by_tag[e.tag] = static_cast<NodeIndex>(g.nodes.size());
        g.nodes.push_back(n);
    }

    std::set<std::string> referenced;
    std::vector<std::vector<EdgeIndex>> elem_children(g.nodes.size());
    for (const auto& e : elems) {
        NodeIndex p = by_tag[e.tag];
        for (const auto& [ctag, card] : e.children) {
            auto it = by_tag.find(ctag);
            if (it == by_tag.end())
                throw DanglingReference("element '" + ctag + "' referenced by '" + e.tag + "' is not declared");
            referenced.insert(ctag);
            EdgeIndex ei = static_cast<EdgeIndex>(g.edges.size());
            g.edges.push_back({p, it->second, card});
            elem_children[static_cast<size_t>(p)].push_back(ei);
        }
    }

    // Attribute nodes, one per (owner, name).
    std::vector<std::vector<EdgeIndex>> attr_children(g.nodes.size());
    std::set<std::pair<std::string, std::string>> seen_attr;
    for (const auto& a : attrs) {
        auto it = by_tag.find(a.owner);
        if (it == by_tag.end())
            throw DanglingReference("ATTLIST references undeclared element: " + a.owner);
        if (!seen_attr.insert({a.owner, a.name}).second)
            throw SyntaxError("attribute declared twice: " + a.owner + ".@" + a.name);
        DtdNode n;
        n.tag = a.name;
        n.is_attribute = true;
        n.valued = true;
        n.attr_kind = a.kind;
        n.attr_optional = a.optional;
        n.owner = it->second;
        NodeIndex ni = static_cast<NodeIndex>(g.nodes.size());
        g.nodes.push_back(n);
        EdgeIndex ei = static_cast<EdgeIndex>(g.edges.size());
        g.edges.push_back({it->second, ni, a.optional ? Cardinality::Optional : Cardinality::One});
        attr_children[static_cast<size_t>(it->second)].push_back(ei);
    }
    elem_children.resize(g.nodes.size());
    attr_children.resize(g.nodes.size());

    // Canonical child order: attributes sorted by name, then declaration order.
    g.out.assign(g.nodes.size(), {});
    g.in.assign(g.nodes.size(), {});
    for (size_t p = 0; p < g.nodes.size(); ++p) {
        auto& ac = attr_children[p];
        std::sort(ac.begin(), ac.end(), [&](EdgeIndex x, EdgeIndex y) {
            return g.node(g.edge(x).child).tag < g.node(g.edge(y).child).tag;
        });
        for (EdgeIndex e : ac) g.out[p].push_back(e);
        for (EdgeIndex e : elem_children[p]) g.out[p].push_back(e);
    }
    for (size_t e = 0; e < g.edges.size(); ++e)
        g.in[static_cast<size_t>(g.edges[e].child)].push_back(static_cast<EdgeIndex>(e));

    // Root: the unique element never used as a child.
    std::vector<NodeIndex> roots;
    for (const auto& e : elems)
        if (!referenced.count(e.tag)) roots.push_back(by_tag[e.tag]);
    if (roots.empty()) throw CycleError("no root element: every element is referenced (cyclic schema)");
    if (roots.size() > 1) {
        std::string msg = "multiple root candidates:";
        for (NodeIndex r : roots) msg += " " + g.node(r).tag;
        throw ValidationError(msg);
    }
    g.root = roots[0];

    // Element-edge acyclicity.
    std::vector<int> state(g.nodes.size(), 0);
    std::function<void(NodeIndex)> dfs = [&](NodeIndex n) {
        state[static_cast<size_t>(n)] = 1;
        for (EdgeIndex e : g.out[static_cast<size_t>(n)]) {
            NodeIndex c = g.edge(e).child;
            if (g.node(c).is_attribute) continue;
            if (state[static_cast<size_t>(c)] == 1)
                throw CycleError("element recursion through '" + g.node(c).tag + "'");
            if (state[static_cast<size_t>(c)] == 0) dfs(c);
        }
        state[static_cast<size_t>(n)] = 2;
    };
    dfs(g.root);
    for (size_t i = 0; i < g.nodes.size(); ++i)
        if (!g.nodes[i].is_attribute && state[i] == 0)
            throw CycleError("element '" + g.nodes[i].tag + "' is unreachable from the root");

    // Links.
    for (const auto& line : link_lines) {
        LinkDecl l = parse_link_decl(line);
        NodeIndex re = g.find_element(l.ref_elem);
        NodeIndex ie = g.find_element(l.id_elem);
        if (re < 0 || ie < 0) throw DanglingReference("LINK references undeclared element: " + line);
        NodeIndex ra = g.find_attribute(re, l.ref_attr);
        NodeIndex ia = g.find_attribute(ie, l.id_attr);
        if (ra < 0 || ia < 0) throw DanglingReference("LINK references undeclared attribute: " + line);
        if (g.node(ra).attr_kind != AttrKind::Idref)
            throw ValidationError("LINK source is not an IDREF attribute: " + line);
        if (g.node(ia).attr_kind != AttrKind::Id)
            throw ValidationError("LINK target is not an ID attribute: " + line);
        g.links.push_back({ra, ia});
    }

    g.name = name.empty() ? g.node(g.root).tag : name;
    return g;
}

std::string serialize_dtd(const DtdGraph& g) {
    std::ostringstream out;
    auto card_suffix = [](Cardinality c) {
        switch (c) {
            case Cardinality::One: return "";
            case Cardinality::Optional: return "?";
            case Cardinality::Star: return "*";
            case Cardinality::Plus: return "+";
        }
        return "";
    };
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        const DtdNode& n = g.nodes[i];
        if (n.is_attribute) continue;
        std::vector<EdgeIndex> elem_edges;
        for (EdgeIndex e : g.out[i])
            if (!g.node(g.edge(e).child).is_attribute) elem_edges.push_back(e);
        if (n.valued) {
            out << "<!ELEMENT " << n.tag << " (#PCDATA)>\n";
        } else if (elem_edges.empty()) {
            out << "<!ELEMENT " << n.tag << " EMPTY>\n";
        } else {
            out << "<!ELEMENT " << n.tag << " (";
            for (size_t k = 0; k < elem_edges.size(); ++k) {
                const DtdEdge& e = g.edge(elem_edges[k]);
                if (k) out << ", ";
                out << g.node(e.child).tag << card_suffix(e.card);
            }
            out << ")>\n";
        }
        for (EdgeIndex e : g.out[i]) {
            NodeIndex c = g.edge(e).child;
            if (!g.node(c).is_attribute) continue;
            const DtdNode& a = g.node(c);
            const char* kind = a.attr_kind == AttrKind::Id ? "ID" : a.attr_kind == AttrKind::Idref ? "IDREF" : "CDATA";
            out << "<!ATTLIST " << n.tag << " " << a.tag << " (" << kind << ") "
                << (a.attr_optional ? "#IMPLIED" : "#REQUIRED") << ">\n";
        }
    }
    for (const IdrefLink& l : g.links) {
        const DtdNode& ra = g.node(l.ref_attr);
        const DtdNode& ia = g.node(l.id_attr);
        out << "LINK " << g.node(ra.owner).tag << ".@" << ra.tag << " -> "
            << g.node(ia.owner).tag << ".@" << ia.tag << "\n";
    }
    return out.str();
}

bool graphs_equal(const DtdGraph& a, const DtdGraph& b) {
    return serialize_dtd(a) == serialize_dtd(b);
}

std::set<std::vector<std::string>> dtd_paths(const DtdGraph& g, NodeIndex from, NodeIndex to) {
    std::set<std::vector<std::string>> result;
    std::vector<std::string> labels;
    std::function<void(NodeIndex)> dfs = [&](NodeIndex n) {
        if (n == to) result.insert(labels);
        for (EdgeIndex e : g.out[static_cast<size_t>(n)]) {
            NodeIndex c = g.edge(e).child;
            labels.push_back(g.node(c).display_tag());
            dfs(c);
            labels.pop_back();
        }
    };
    dfs(from);
    return result;
}

} // namespace xmap
