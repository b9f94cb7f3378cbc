#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "semilift/ldata.hpp"
#include "semilift/transfer.hpp"

namespace semilift {

// ---------------------------------------------------------------------------
// Text fixtures. A document is a sequence of sections, each opened by a
// bracketed header line and populated by `key: value` lines. Sections must
// appear grouped in the fixed order
//
//   [group] [rep] [char] [places] [ldata] [extension] [pair]
//
// with any number of instances of each kind (including zero). Every section
// starts with a `name:` line; names are unique within their kind and later
// sections refer to earlier ones by name. Blank lines and lines starting
// with '#' are ignored. Any unknown section, unknown key, duplicate key,
// missing key, or unresolved reference is rejected with the offending line
// number; constructor invariants (group axioms, multiplicativity, place
// shape) are re-raised the same way.
//
// Section keys (in canonical print order):
//
//   [group]     name, table          table rows '/'-separated, entries
//                                    space-separated element labels
//   [rep]       name, group, dim,    one `image k:` per element k holding a
//               image 0..n-1         bracketed matrix [[a, b], [c, d]] of
//                                    exact cyclotomic literals
//   [char]      name, value          value: dirichlet(N; v, ...)
//   [places]    name, place <label>  value: q=.. frob=.. inertia=(..)
//                                    monodromy=[..]
//   [ldata]     name, kind: galois   field, degree, rep, places, arch
//               name, kind: formal   field, degree, epsilon-w,
//                                    epsilon-delta, arch, then one
//                                    `place <label>:` per place with
//                                    q=.. semistable=0/1 factor={..}
//   [extension] name, base, ext,     cutter names a [char]; the optional
//               cutter, [table]      table names a formal [ldata] over the
//                                    extension field (used by descent runs)
//   [pair]      name, left, right,   left/right name [ldata] entries;
//               left-unknown,        the unknown masks are sorted
//               right-unknown        parenthesized label lists, e.g. (5, 7)
//
// Splitting rules for implicit places are deliberately not representable:
// rule tables are machine-scale derived objects, while fixtures exist to be
// audited by eye. parse and print are mutually inverse: print always emits
// the canonical form, and parse(print(doc)) reproduces doc exactly.
// ---------------------------------------------------------------------------
struct FixtureDocument {
    struct RepEntry {
        std::string name;
        std::string group_ref;
        Representation value;
    };
    struct PlacesEntry {
        std::string name;
        std::vector<GaloisPlace> value;
    };
    struct DatumEntry {
        std::string name;
        bool galois = true;
        std::string rep_ref;    // galois only
        std::string places_ref; // galois only
        LData value;
    };
    struct ExtensionEntry {
        std::string name;
        std::string cutter_ref;
        std::string table_ref; // empty when absent
        CyclicExtensionDatum value;
    };
    struct PairEntry {
        std::string name;
        std::string left_ref;
        std::string right_ref;
        std::set<std::string> left_unknown;
        std::set<std::string> right_unknown;
    };

    std::vector<std::pair<std::string, GroupPtr>> groups;
    std::vector<RepEntry> reps;
    std::vector<std::pair<std::string, DirichletCharacter>> characters;
    std::vector<PlacesEntry> places;
    std::vector<DatumEntry> data;
    std::vector<ExtensionEntry> extensions;
    std::vector<PairEntry> pairs;

    // Lookups by name; DOMAIN when absent.
    const GroupPtr& group(const std::string& name) const;
    const Representation& rep(const std::string& name) const;
    const DirichletCharacter& character(const std::string& name) const;
    const std::vector<GaloisPlace>& place_list(const std::string& name) const;
    const LData& datum(const std::string& name) const;
    const ExtensionEntry& extension(const std::string& name) const;

    // Assembles the named [pair] into a validated transfer pair.
    TransferPair transfer_pair(const std::string& name) const;
};

// Validated document, or PARSE_ERROR with the first offending line number.
FixtureDocument parse_fixture(std::string_view text);

// Canonical rendering; parse_fixture(print_fixture(doc)) == doc.
std::string print_fixture(const FixtureDocument& doc);

} // namespace semilift
