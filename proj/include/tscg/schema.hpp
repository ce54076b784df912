#pragma once
// Dialect-neutral tool catalog model. Parsers for the three supported JSON
// dialects normalize into ToolCatalog; semantic_atoms() projects a catalog
// onto the comparable atom set used by the superset verifier.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tscg/errors.hpp"
#include "tscg/lexicon.hpp"
#include "tscg/util.hpp"

namespace tscg {

using ojson = nlohmann::ordered_json;

enum class Dialect { openai_fc, anthropic_tool_use, mcp, compiled_text };

inline Dialect dialect_from_tag(const std::string& tag) {
    if (tag == "openai-fc") return Dialect::openai_fc;
    if (tag == "anthropic-tool-use") return Dialect::anthropic_tool_use;
    if (tag == "mcp") return Dialect::mcp;
    throw UnknownDialect("unknown dialect tag: " + tag);
}

inline const char* dialect_tag(Dialect d) {
    switch (d) {
        case Dialect::openai_fc: return "openai-fc";
        case Dialect::anthropic_tool_use: return "anthropic-tool-use";
        case Dialect::mcp: return "mcp";
        case Dialect::compiled_text: return "compiled-text";
    }
    return "?";
}

enum class JsonType { string_t, integer_t, number_t, boolean_t, array_t, object_t, enum_t };

inline const char* json_type_name(JsonType t) {
    switch (t) {
        case JsonType::string_t: return "string";
        case JsonType::integer_t: return "integer";
        case JsonType::number_t: return "number";
        case JsonType::boolean_t: return "boolean";
        case JsonType::array_t: return "array";
        case JsonType::object_t: return "object";
        case JsonType::enum_t: return "enum";
    }
    return "?";
}

// Compiled-grammar abbreviation for a type.
inline const char* json_type_abbrev(JsonType t) {
    switch (t) {
        case JsonType::string_t: return "str";
        case JsonType::integer_t: return "int";
        case JsonType::number_t: return "num";
        case JsonType::boolean_t: return "bool";
        case JsonType::array_t: return "arr";
        case JsonType::object_t: return "obj";
        case JsonType::enum_t: return "enum";
    }
    return "?";
}

struct ParamSpec {
    std::string name;  // dotted for params hoisted out of one nesting level
    JsonType type = JsonType::string_t;
    bool required = true;
    std::vector<std::string> enum_values;
    std::optional<double> min_bound, max_bound;
    std::string description;
};

struct ToolSchema {
    std::string name;
    std::string description;
    std::vector<ParamSpec> params;  // source order
};

struct ToolCatalog {
    std::vector<ToolSchema> tools;  // source order
    Dialect source_dialect = Dialect::mcp;
    std::string source_text;        // raw input, kept for token accounting
    std::string source_bytes_hash;  // fnv1a64 of source_text
};

// "p:str", "mode:enum[a|b]", "n?:int[1..10]"
inline std::string render_param(const ParamSpec& p) {
    std::string out = p.name;
    if (!p.required) out += '?';
    out += ':';
    if (p.type == JsonType::enum_t) {
        out += "enum[";
        for (std::size_t i = 0; i < p.enum_values.size(); ++i) {
            if (i) out += '|';
            out += p.enum_values[i];
        }
        out += ']';
    } else {
        out += json_type_abbrev(p.type);
        if ((p.type == JsonType::integer_t || p.type == JsonType::number_t) &&
            (p.min_bound || p.max_bound)) {
            out += '[';
            if (p.min_bound) out += canonical_number(*p.min_bound);
            out += "..";
            if (p.max_bound) out += canonical_number(*p.max_bound);
            out += ']';
        }
    }
    return out;
}

inline std::string render_param_block(const ToolSchema& tool) {
    std::string out = "(";
    for (std::size_t i = 0; i < tool.params.size(); ++i) {
        if (i) out += ' ';
        out += render_param(tool.params[i]);
    }
    out += ')';
    return out;
}

namespace detail {

inline std::string json_scalar_to_string(const ojson& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

// Keywords the model represents directly; everything else is preserved as an
// opaque description suffix so no schema information is silently dropped.
inline bool known_param_keyword(const std::string& k) {
    return k == "type" || k == "description" || k == "enum" || k == "minimum" ||
           k == "maximum" || k == "properties" || k == "required";
}

inline void reject_combinators(const ojson& schema, const std::string& path) {
    for (const char* kw : {"oneOf", "anyOf", "allOf", "not", "$ref"}) {
        if (schema.contains(kw))
            throw UnsupportedSchemaFeature("unsupported schema combinator", path + "/" + kw);
    }
}

inline std::string opaque_suffix(const ojson& obj, std::initializer_list<const char*> skip) {
    ojson extra = ojson::object();
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool skipped = false;
        for (const char* s : skip)
            if (it.key() == s) skipped = true;
        if (!skipped) extra[it.key()] = it.value();
    }
    if (extra.empty()) return "";
    return " " + extra.dump();
}

inline JsonType parse_type_field(const ojson& schema, const std::string& path) {
    if (!schema.contains("type")) return JsonType::string_t;
    const auto& tv = schema.at("type");
    if (!tv.is_string())
        throw UnsupportedSchemaFeature("non-string type", path + "/type");
    std::string t = tv.get<std::string>();
    if (t == "string") return JsonType::string_t;
    if (t == "integer") return JsonType::integer_t;
    if (t == "number") return JsonType::number_t;
    if (t == "boolean") return JsonType::boolean_t;
    if (t == "array") return JsonType::array_t;
    if (t == "object") return JsonType::object_t;
    throw UnsupportedSchemaFeature("unsupported type '" + t + "'", path + "/type");
}

// required-ness: membership in the required array when one exists; with no
// array every param is required unless its description leads with "Optional".
inline bool param_required(const std::string& name, const ojson* required_array,
                           const std::string& description) {
    if (required_array) {
        for (const auto& r : *required_array)
            if (r.is_string() && r.get<std::string>() == name) return true;
        return false;
    }
    std::string lower = to_lower_ascii(description);
    return !(lower.rfind("optional", 0) == 0);
}

inline ParamSpec parse_leaf_param(const std::string& name, const ojson& prop,
                                  const ojson* required_array, const std::string& path) {
    ParamSpec p;
    p.name = name;
    if (prop.contains("description") && prop.at("description").is_string())
        p.description = collapse_whitespace(prop.at("description").get<std::string>());
    p.required = param_required(name, required_array, p.description);
    if (prop.contains("enum")) {
        p.type = JsonType::enum_t;
        for (const auto& v : prop.at("enum")) p.enum_values.push_back(json_scalar_to_string(v));
    } else {
        p.type = parse_type_field(prop, path);
    }
    if (p.type == JsonType::integer_t || p.type == JsonType::number_t) {
        if (prop.contains("minimum") && prop.at("minimum").is_number())
            p.min_bound = prop.at("minimum").get<double>();
        if (prop.contains("maximum") && prop.at("maximum").is_number())
            p.max_bound = prop.at("maximum").get<double>();
        p.description += opaque_suffix(prop, {"type", "description", "enum", "minimum", "maximum"});
    } else {
        p.description += opaque_suffix(prop, {"type", "description", "enum"});
    }
    return p;
}

inline void parse_schema_params(ToolSchema& tool, const ojson& schema, const std::string& path) {
    if (!schema.is_object()) {
        if (schema.is_null()) return;
        throw MalformedJson("parameter schema is not an object at " + path);
    }
    reject_combinators(schema, path);
    if (!schema.contains("properties")) return;
    const ojson& props = schema.at("properties");
    if (!props.is_object())
        throw MalformedJson("properties is not an object at " + path + "/properties");
    const ojson* required = nullptr;
    if (schema.contains("required") && schema.at("required").is_array())
        required = &schema.at("required");

    for (auto it = props.begin(); it != props.end(); ++it) {
        const std::string& name = it.key();
        const ojson& prop = it.value();
        std::string ppath = path + "/properties/" + name;
        if (!prop.is_object()) throw MalformedJson("property is not an object at " + ppath);

        bool is_nested_object = prop.contains("properties") &&
                                (!prop.contains("type") ||
                                 (prop.at("type").is_string() &&
                                  prop.at("type").get<std::string>() == "object"));
        if (is_nested_object) {
            // hoist one level to dotted names; deeper objects stay opaque
            bool outer_required = param_required(
                name, required,
                prop.contains("description") && prop.at("description").is_string()
                    ? prop.at("description").get<std::string>()
                    : "");
            const ojson& inner_props = prop.at("properties");
            const ojson* inner_required = nullptr;
            if (prop.contains("required") && prop.at("required").is_array())
                inner_required = &prop.at("required");
            for (auto in = inner_props.begin(); in != inner_props.end(); ++in) {
                std::string dotted = name + "." + in.key();
                std::string ipath = ppath + "/properties/" + in.key();
                if (!in.value().is_object())
                    throw MalformedJson("property is not an object at " + ipath);
                ParamSpec child;
                if (in.value().contains("properties")) {
                    // second nesting level: keep as one opaque object param
                    child.name = dotted;
                    child.type = JsonType::object_t;
                    child.required = param_required(in.key(), inner_required, "");
                    child.description = collapse_whitespace(
                        in.value().contains("description") &&
                                in.value().at("description").is_string()
                            ? in.value().at("description").get<std::string>()
                            : "");
                    child.description += opaque_suffix(in.value(), {"type", "description"});
                } else {
                    child = parse_leaf_param(in.key(), in.value(), inner_required, ipath);
                    child.name = dotted;
                }
                child.required = child.required && outer_required;
                tool.params.push_back(std::move(child));
            }
        } else {
            tool.params.push_back(parse_leaf_param(name, prop, required, ppath));
        }
    }

    for (std::size_t i = 0; i < tool.params.size(); ++i)
        for (std::size_t j = i + 1; j < tool.params.size(); ++j)
            if (tool.params[i].name == tool.params[j].name)
                throw MalformedJson("duplicate param name '" + tool.params[i].name +
                                    "' after flattening in tool " + tool.name);
}

inline ToolSchema parse_tool_object(const ojson& obj, const char* schema_key,
                                    const std::string& path) {
    ToolSchema tool;
    if (!obj.contains("name") || !obj.at("name").is_string() ||
        obj.at("name").get<std::string>().empty())
        throw MalformedJson("tool missing non-empty name at " + path);
    tool.name = obj.at("name").get<std::string>();
    for (unsigned char c : tool.name)
        if (is_space_char(c)) throw MalformedJson("tool name contains whitespace at " + path);
    if (obj.contains("description") && obj.at("description").is_string())
        tool.description = collapse_whitespace(obj.at("description").get<std::string>());
    if (obj.contains(schema_key))
        parse_schema_params(tool, obj.at(schema_key), path + "/" + schema_key);
    tool.description += opaque_suffix(obj, {"name", "description", schema_key, "type"});
    return tool;
}

}  // namespace detail

inline ToolCatalog parse_catalog(const std::string& json_text, Dialect dialect) {
    ojson root;
    try {
        root = ojson::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedJson(e.what());
    }

    const char* schema_key = dialect == Dialect::openai_fc         ? "parameters"
                             : dialect == Dialect::anthropic_tool_use ? "input_schema"
                                                                      : "inputSchema";

    const ojson* list = nullptr;
    ojson singleton;
    if (root.is_array()) {
        list = &root;
    } else if (root.is_object() && root.contains("tools") && root.at("tools").is_array()) {
        list = &root.at("tools");
    } else if (root.is_object() && (root.contains("name") || root.contains("function"))) {
        // a single bare tool object counts as a one-tool catalog
        singleton = ojson::array({root});
        list = &singleton;
    } else {
        throw MalformedJson("expected a tool array or an object with a 'tools' array");
    }

    ToolCatalog cat;
    cat.source_dialect = dialect;
    cat.source_text = json_text;
    cat.source_bytes_hash = fnv1a64_hex(json_text);

    int idx = 0;
    for (const auto& item : *list) {
        std::string path = "/tools/" + std::to_string(idx++);
        if (!item.is_object()) throw MalformedJson("tool entry is not an object at " + path);
        const ojson* obj = &item;
        if (dialect == Dialect::openai_fc && item.contains("function") &&
            item.at("function").is_object())
            obj = &item.at("function");
        cat.tools.push_back(detail::parse_tool_object(*obj, schema_key, path));
    }

    for (std::size_t i = 0; i < cat.tools.size(); ++i)
        for (std::size_t j = i + 1; j < cat.tools.size(); ++j)
            if (cat.tools[i].name == cat.tools[j].name)
                throw DuplicateToolName("duplicate tool name: " + cat.tools[i].name);
    return cat;
}

// Canonical serialization of a catalog back into a dialect's JSON shape.
// Dotted (flattened) param names stay flat; this is the serialization used
// when a catalog was built in memory and no source bytes exist.
inline ojson catalog_to_json(const ToolCatalog& cat, Dialect dialect) {
    auto schema_of = [](const ToolSchema& t) {
        ojson schema;
        schema["type"] = "object";
        ojson props = ojson::object();
        ojson required = ojson::array();
        for (const auto& p : t.params) {
            ojson prop;
            if (p.type == JsonType::enum_t) {
                prop["enum"] = p.enum_values;
            } else {
                prop["type"] = json_type_name(p.type);
                if (p.min_bound) prop["minimum"] = *p.min_bound;
                if (p.max_bound) prop["maximum"] = *p.max_bound;
            }
            if (!p.description.empty()) prop["description"] = p.description;
            props[p.name] = prop;
            if (p.required) required.push_back(p.name);
        }
        schema["properties"] = props;
        schema["required"] = required;
        return schema;
    };

    ojson tools = ojson::array();
    for (const auto& t : cat.tools) {
        ojson entry;
        if (dialect == Dialect::openai_fc) {
            ojson fn;
            fn["name"] = t.name;
            fn["description"] = t.description;
            fn["parameters"] = schema_of(t);
            entry["type"] = "function";
            entry["function"] = fn;
        } else {
            entry["name"] = t.name;
            entry["description"] = t.description;
            entry[dialect == Dialect::anthropic_tool_use ? "input_schema" : "inputSchema"] =
                schema_of(t);
        }
        tools.push_back(entry);
    }
    ojson root;
    root["tools"] = tools;
    return root;
}

// ---------------------------------------------------------------------------
// semantic atoms

enum class AtomKind {
    tool_name,
    param_name,
    param_type,
    required_flag,
    enum_value,
    numeric_bound,
    description_content_word,
};

inline const char* atom_kind_name(AtomKind k) {
    switch (k) {
        case AtomKind::tool_name: return "tool-name";
        case AtomKind::param_name: return "param-name";
        case AtomKind::param_type: return "param-type";
        case AtomKind::required_flag: return "required-flag";
        case AtomKind::enum_value: return "enum-value";
        case AtomKind::numeric_bound: return "numeric-bound";
        case AtomKind::description_content_word: return "description-content-word";
    }
    return "?";
}

struct SemanticAtom {
    AtomKind kind;
    std::string tool;
    std::string value;

    bool operator<(const SemanticAtom& o) const {
        if (kind != o.kind) return kind < o.kind;
        if (tool != o.tool) return tool < o.tool;
        return value < o.value;
    }
    bool operator==(const SemanticAtom& o) const {
        return kind == o.kind && tool == o.tool && value == o.value;
    }
    std::string to_string() const {
        return std::string(atom_kind_name(kind)) + "(" + tool + ", " + value + ")";
    }
};

using SemanticAtomSet = std::set<SemanticAtom>;

inline bool is_structural_kind(AtomKind k) {
    return k != AtomKind::description_content_word;
}

namespace detail {

inline void add_content_words(SemanticAtomSet& atoms, const std::string& tool,
                              const std::string& text, const FillerLexicon& lexicon) {
    std::string stripped = lexicon.strip(text);
    std::string word;
    auto flush = [&] {
        if (!word.empty()) {
            atoms.insert({AtomKind::description_content_word, tool, to_lower_ascii(word)});
            word.clear();
        }
    };
    for (unsigned char c : stripped) {
        if (std::isalnum(c) || c == '_')
            word.push_back(static_cast<char>(c));
        else
            flush();
    }
    flush();
}

}  // namespace detail

// The comparable meaning of a catalog: structural atoms (names, types,
// required flags, enum values, numeric bounds) plus the multiset-collapsed
// content words of descriptions with filler phrases excluded.
inline SemanticAtomSet semantic_atoms(const ToolCatalog& cat, const FillerLexicon& lexicon) {
    SemanticAtomSet atoms;
    for (const auto& t : cat.tools) {
        atoms.insert({AtomKind::tool_name, t.name, t.name});
        detail::add_content_words(atoms, t.name, t.description, lexicon);
        for (const auto& p : t.params) {
            atoms.insert({AtomKind::param_name, t.name, p.name});
            atoms.insert({AtomKind::param_type, t.name,
                          p.name + ":" + json_type_name(p.type)});
            atoms.insert({AtomKind::required_flag, t.name,
                          p.name + ":" + (p.required ? "req" : "opt")});
            for (const auto& v : p.enum_values)
                atoms.insert({AtomKind::enum_value, t.name, p.name + "=" + v});
            if (p.min_bound)
                atoms.insert({AtomKind::numeric_bound, t.name,
                              p.name + ".min=" + canonical_number(*p.min_bound)});
            if (p.max_bound)
                atoms.insert({AtomKind::numeric_bound, t.name,
                              p.name + ".max=" + canonical_number(*p.max_bound)});
            detail::add_content_words(atoms, t.name, p.description, lexicon);
        }
    }
    return atoms;
}

}  // namespace tscg
