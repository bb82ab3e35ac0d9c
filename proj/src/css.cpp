#include "consentscan/css.hpp"

#include <cctype>

namespace consentscan::css {

namespace {

bool is_ident_char(char c)
{
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '-' || c == '_' || u >= 0x80;
}

std::string ascii_lower(std::string s)
{
    for (auto& c : s) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    Selector run()
    {
        Selector sel;
        skip_ws();
        if (at_end()) fail("empty selector");
        while (true) {
            sel.alternatives.push_back(complex());
            skip_ws();
            if (at_end()) break;
            if (peek() != ',') fail("unexpected character");
            ++pos_;
            skip_ws();
        }
        return sel;
    }

private:
    Complex complex()
    {
        Complex c;
        c.parts.push_back(compound());
        while (true) {
            const bool had_ws = skip_ws();
            if (at_end() || peek() == ',') break;
            if (peek() == '>') {
                ++pos_;
                skip_ws();
                c.combinators.push_back(Combinator::child);
            } else if (peek() == '+' || peek() == '~') {
                fail("sibling combinators are not supported");
            } else if (had_ws) {
                c.combinators.push_back(Combinator::descendant);
            } else {
                fail("unexpected character");
            }
            c.parts.push_back(compound());
        }
        return c;
    }

    Compound compound()
    {
        Compound c;
        bool any = false;
        if (!at_end() && peek() == '*') {
            ++pos_;
            c.tag = "*";
            any = true;
        } else if (!at_end() && is_ident_char(peek())) {
            c.tag = ascii_lower(ident());
            any = true;
        }
        while (!at_end()) {
            const char ch = peek();
            if (ch == '#') {
                ++pos_;
                c.ids.push_back(ident());
            } else if (ch == '.') {
                ++pos_;
                c.classes.push_back(ident());
            } else if (ch == '[') {
                ++pos_;
                c.attrs.push_back(attribute());
            } else if (ch == ':') {
                fail("pseudo-classes are not supported");
            } else if (ch == '\\') {
                fail("escapes are not supported");
            } else {
                break;
            }
            any = true;
        }
        if (!any) fail("expected a simple selector");
        return c;
    }

    AttrTest attribute()
    {
        AttrTest t;
        skip_ws();
        t.name = ascii_lower(ident());
        skip_ws();
        if (at_end()) fail("unterminated attribute selector");
        if (peek() == ']') {
            ++pos_;
            return t;
        }
        const char op = peek();
        if (op == '=') {
            t.op = AttrOp::equals;
            ++pos_;
        } else {
            if (pos_ + 1 >= s_.size() || s_[pos_ + 1] != '=') fail("bad attribute operator");
            switch (op) {
            case '*': t.op = AttrOp::contains; break;
            case '^': t.op = AttrOp::prefix; break;
            case '$': t.op = AttrOp::suffix; break;
            case '~': t.op = AttrOp::word; break;
            default: fail("unsupported attribute operator");
            }
            pos_ += 2;
        }
        skip_ws();
        if (at_end()) fail("unterminated attribute selector");
        if (peek() == '"' || peek() == '\'') {
            const char q = s_[pos_++];
            const auto end = s_.find(q, pos_);
            if (end == std::string::npos) fail("unterminated string");
            t.value = s_.substr(pos_, end - pos_);
            if (t.value.find('\\') != std::string::npos) fail("escapes are not supported");
            pos_ = end + 1;
        } else {
            t.value = ident();
        }
        skip_ws();
        if (at_end() || peek() != ']') fail("attribute flags are not supported");
        ++pos_;
        return t;
    }

    std::string ident()
    {
        const auto start = pos_;
        while (!at_end() && is_ident_char(peek())) ++pos_;
        if (pos_ == start) fail("expected identifier");
        return s_.substr(start, pos_ - start);
    }

    bool skip_ws()
    {
        const auto start = pos_;
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
        return pos_ != start;
    }

    bool at_end() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }

    [[noreturn]] void fail(const std::string& why) const
    {
        throw UnsupportedSelector(why + " at offset " + std::to_string(pos_) + " in '" + s_ + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

std::vector<std::string> split_ws(const std::string& s)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const auto start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

bool attr_matches(const DomNode& node, const AttrTest& t)
{
    const auto* v = node.attribute(t.name);
    if (!v) return false;
    switch (t.op) {
    case AttrOp::exists: return true;
    case AttrOp::equals: return *v == t.value;
    case AttrOp::contains: return !t.value.empty() && v->find(t.value) != std::string::npos;
    case AttrOp::prefix: return !t.value.empty() && v->rfind(t.value, 0) == 0;
    case AttrOp::suffix:
        return !t.value.empty() && v->size() >= t.value.size() &&
               v->compare(v->size() - t.value.size(), t.value.size(), t.value) == 0;
    case AttrOp::word:
        for (const auto& w : split_ws(*v)) {
            if (w == t.value) return true;
        }
        return false;
    }
    return false;
}

// Matches parts[0..=idx] with parts[idx] anchored at node_id.
bool match_from(const PageSnapshot& snapshot, int node_id, const Complex& c, std::size_t idx)
{
    if (!matches_compound(snapshot.node(node_id), c.parts[idx])) return false;
    if (idx == 0) return true;
    const auto comb = c.combinators[idx - 1];
    auto parent = snapshot.parent(node_id);
    if (comb == Combinator::child) {
        return parent && match_from(snapshot, *parent, c, idx - 1);
    }
    for (; parent; parent = snapshot.parent(*parent)) {
        if (match_from(snapshot, *parent, c, idx - 1)) return true;
    }
    return false;
}

} // namespace

Selector parse(const std::string& text)
{
    return Parser(text).run();
}

bool matches_compound(const DomNode& node, const Compound& c)
{
    if (!c.tag.empty() && c.tag != "*" && node.tag != c.tag) return false;
    if (!c.ids.empty()) {
        const auto* id = node.attribute("id");
        for (const auto& want : c.ids) {
            if (!id || *id != want) return false;
        }
    }
    if (!c.classes.empty()) {
        const auto* cls = node.attribute("class");
        if (!cls) return false;
        const auto have = split_ws(*cls);
        for (const auto& want : c.classes) {
            bool found = false;
            for (const auto& h : have) {
                if (h == want) {
                    found = true;
                    break;
                }
            }
            if (!found) return false;
        }
    }
    for (const auto& a : c.attrs) {
        if (!attr_matches(node, a)) return false;
    }
    return true;
}

bool matches(const PageSnapshot& snapshot, int node_id, const Selector& selector)
{
    for (const auto& alt : selector.alternatives) {
        if (match_from(snapshot, node_id, alt, alt.parts.size() - 1)) return true;
    }
    return false;
}

std::vector<int> match_all(const PageSnapshot& snapshot, const Selector& selector)
{
    std::vector<int> out;
    for (const auto& n : snapshot.nodes()) {
        if (matches(snapshot, n.node_id, selector)) out.push_back(n.node_id);
    }
    return out;
}

std::vector<int> css_match(const PageSnapshot& snapshot, const std::string& selector)
{
    return match_all(snapshot, parse(selector));
}

} // namespace consentscan::css
