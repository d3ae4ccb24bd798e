#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "wcoj/query.hpp"

namespace wcoj {

// One subgoal of a (possibly unreduced) full conjunctive query. vars lists the
// query variable for each non-constant column of the stored relation, in
// column order; variables may repeat. constants pins columns by index.
struct Atom {
    std::vector<std::string> vars;
    std::map<int, std::string> constants;
    std::string relationPath;
};

struct QueryFile {
    std::vector<std::string> attributes;
    std::vector<Atom> atoms;
    std::vector<std::array<std::string, 3>> fds;  // (edge index as string, u, v)
};

// Relation file: line 1 `#relation <name> <attr1> <attr2> ...`, then one
// tab-separated row per line.
Relation load_relation(const std::filesystem::path& path, const std::vector<AttrId>& schema,
                       Dictionary& dict, std::vector<std::string>* columnNames = nullptr);
void write_relation(const std::filesystem::path& path, const std::string& name,
                    const std::vector<std::string>& columnNames, const Relation& r,
                    const Dictionary* dict);

struct LoadedQuery {
    JoinQuery query;                            // reduced; FD expansion not applied
    std::vector<std::array<AttrId, 2>> fdAttrs; // (u, v) per fd
    std::vector<int> fdEdges;                   // edge index per fd
    bool hadFds = false;
};

LoadedQuery load_query(const std::filesystem::path& jsonPath);

// Writes query.json plus one relation file per distinct binding into dir.
void write_instance(const std::filesystem::path& dir, const JoinQuery& q,
                    const std::string& baseName);

}  // namespace wcoj
