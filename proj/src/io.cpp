#include "wcoj/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wcoj/preprocess.hpp"

namespace wcoj {

namespace {

RawTable load_raw_table(const std::filesystem::path& path, Dictionary& dict) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open relation file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty relation file " + path.string());
    std::istringstream hdr(line);
    std::string tag;
    hdr >> tag;
    if (tag != "#relation")
        throw SchemaError(path.string() + ": first line must start with #relation");
    RawTable t;
    hdr >> t.name;
    std::string col;
    while (hdr >> col) t.columnNames.push_back(col);
    if (t.columnNames.empty()) throw SchemaError(path.string() + ": no columns in header");

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<Value> row;
        size_t start = 0;
        while (true) {
            size_t tab = line.find('\t', start);
            std::string tok = line.substr(start, tab == std::string::npos ? tab : tab - start);
            row.push_back(dict.encode(tok));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (row.size() != t.arity())
            throw SchemaError(path.string() + ": row with " + std::to_string(row.size()) +
                              " values, expected " + std::to_string(t.arity()));
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace

Relation load_relation(const std::filesystem::path& path, const std::vector<AttrId>& schema,
                       Dictionary& dict, std::vector<std::string>* columnNames) {
    RawTable t = load_raw_table(path, dict);
    if (t.arity() != schema.size())
        throw SchemaError(path.string() + ": arity mismatch with requested schema");
    if (columnNames) *columnNames = t.columnNames;
    return Relation(schema, t.rows);
}

void write_relation(const std::filesystem::path& path, const std::string& name,
                    const std::vector<std::string>& columnNames, const Relation& r,
                    const Dictionary* dict) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write relation file " + path.string());
    out << "#relation " << name;
    for (const auto& c : columnNames) out << " " << c;
    out << "\n";
    for (size_t i = 0; i < r.size(); ++i) {
        auto row = r.row(i);
        for (size_t j = 0; j < row.size(); ++j) {
            if (j) out << "\t";
            if (dict)
                out << dict->decode(row[j]);
            else
                out << row[j];
        }
        out << "\n";
    }
}

LoadedQuery load_query(const std::filesystem::path& jsonPath) {
    std::ifstream in(jsonPath);
    if (!in) throw SchemaError("cannot open query file " + jsonPath.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(jsonPath.string() + ": " + e.what());
    }

    FullQuery fq;
    fq.dict = std::make_shared<Dictionary>();
    for (const auto& a : j.at("attributes")) fq.attrNames.push_back(a.get<std::string>());

    auto varId = [&](const std::string& name) -> AttrId {
        for (size_t i = 0; i < fq.attrNames.size(); ++i)
            if (fq.attrNames[i] == name) return static_cast<AttrId>(i);
        throw SchemaError("query: unknown attribute " + name);
    };

    const auto& edges = j.at("edges");
    const auto& rels = j.at("relations");
    const auto base = jsonPath.parent_path();

    std::map<std::string, int> tableIdx;
    for (size_t e = 0; e < edges.size(); ++e) {
        FullQueryAtom atom;
        for (const auto& v : edges[e]) atom.vars.push_back(varId(v.get<std::string>()));

        std::string relPath = rels.at(std::to_string(e)).get<std::string>();
        auto it = tableIdx.find(relPath);
        if (it == tableIdx.end()) {
            fq.tables.push_back(load_raw_table(base / relPath, *fq.dict));
            it = tableIdx.emplace(relPath, static_cast<int>(fq.tables.size() - 1)).first;
        }
        atom.tableIndex = it->second;

        if (j.contains("constants") && j["constants"].contains(std::to_string(e))) {
            for (const auto& [col, val] : j["constants"][std::to_string(e)].items()) {
                Value v = val.is_string() ? fq.dict->encode(val.get<std::string>())
                                          : static_cast<Value>(val.get<std::int64_t>());
                atom.constants[std::stoi(col)] = v;
            }
        }
        fq.atoms.push_back(std::move(atom));
    }

    LoadedQuery out;
    out.query = reduce_full_query(fq);
    if (j.contains("fds")) {
        out.hadFds = true;
        for (const auto& fd : j["fds"]) {
            out.fdEdges.push_back(fd.at(0).get<int>());
            out.fdAttrs.push_back({varId(fd.at(1).get<std::string>()),
                                   varId(fd.at(2).get<std::string>())});
        }
    }
    return out;
}

void write_instance(const std::filesystem::path& dir, const JoinQuery& q,
                    const std::string& baseName) {
    std::filesystem::create_directories(dir);
    nlohmann::json j;
    j["attributes"] = q.attrNames;
    nlohmann::json edges = nlohmann::json::array();
    nlohmann::json rels = nlohmann::json::object();

    // Identical relations (same rows, any schema) share one file.
    std::vector<int> fileOf(q.numEdges(), -1);
    int files = 0;
    for (int e = 0; e < q.numEdges(); ++e) {
        for (int p = 0; p < e; ++p) {
            if (fileOf[p] >= 0 && q.relations[p].arity() == q.relations[e].arity() &&
                q.relations[p].flat() == q.relations[e].flat()) {
                fileOf[e] = fileOf[p];
                break;
            }
        }
        if (fileOf[e] < 0) fileOf[e] = files++;
    }

    std::vector<bool> written(files, false);
    for (int e = 0; e < q.numEdges(); ++e) {
        std::vector<std::string> names;
        nlohmann::json vars = nlohmann::json::array();
        for (size_t c = 0; c < q.relations[e].schema().size(); ++c) {
            AttrId a = q.relations[e].schema()[c];
            names.push_back(q.attrName(a));
            vars.push_back(q.attrName(a));
        }
        std::string file = baseName + std::to_string(fileOf[e]) + ".rel";
        if (!written[fileOf[e]]) {
            std::vector<std::string> cols(q.relations[e].arity());
            for (size_t c = 0; c < cols.size(); ++c) cols[c] = "c" + std::to_string(c);
            write_relation(dir / file, baseName + std::to_string(fileOf[e]), cols,
                           q.relations[e], q.dict.get());
            written[fileOf[e]] = true;
        }
        edges.push_back(vars);
        rels[std::to_string(e)] = file;
    }
    j["edges"] = edges;
    j["relations"] = rels;

    std::ofstream out(dir / "query.json");
    out << j.dump(2) << "\n";
}

}  // namespace wcoj
