#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "consentscan/snapshot.hpp"

namespace consentscan::css {

class UnsupportedSelector : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class AttrOp { exists, equals, contains, prefix, suffix, word };

struct AttrTest {
    std::string name; // lowercase
    AttrOp op = AttrOp::exists;
    std::string value;

    friend bool operator==(const AttrTest&, const AttrTest&) = default;
};

/// One simple-selector sequence, e.g. `div.banner#x[role=dialog]`.
struct Compound {
    std::string tag; // empty or "*" for any
    std::vector<std::string> ids;
    std::vector<std::string> classes;
    std::vector<AttrTest> attrs;

    friend bool operator==(const Compound&, const Compound&) = default;
};

enum class Combinator { descendant, child };

/// Compounds left to right; combinators[i] joins parts[i] and parts[i + 1].
struct Complex {
    std::vector<Compound> parts;
    std::vector<Combinator> combinators;

    friend bool operator==(const Complex&, const Complex&) = default;
};

struct Selector {
    std::vector<Complex> alternatives;

    friend bool operator==(const Selector&, const Selector&) = default;
};

/// Parses tag, `*`, `#id`, `.class`, `[attr]`, `[attr=v]`, `*=`, `^=`, `$=`, `~=`,
/// descendant and child combinators and comma lists. Throws UnsupportedSelector
/// for anything else (pseudo-classes, sibling combinators, escapes, ...).
Selector parse(const std::string& text);

bool matches_compound(const DomNode& node, const Compound& c);
bool matches(const PageSnapshot& snapshot, int node_id, const Selector& selector);

/// Matching node ids in document order.
std::vector<int> match_all(const PageSnapshot& snapshot, const Selector& selector);
std::vector<int> css_match(const PageSnapshot& snapshot, const std::string& selector);

} // namespace consentscan::css
