#pragma once
// Exception types thrown across the library. Everything derives from Error,
// so callers can catch one type at the CLI boundary.

#include <stdexcept>
#include <string>
#include <vector>

namespace tscg {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// schema / catalog parsing
struct MalformedJson : Error {
    using Error::Error;
};
struct UnknownDialect : Error {
    using Error::Error;
};
struct DuplicateToolName : Error {
    using Error::Error;
};
struct UnsupportedSchemaFeature : Error {
    // carries the JSON path of the offending construct
    UnsupportedSchemaFeature(const std::string& msg, std::string path)
        : Error(msg + " at " + path), json_path(std::move(path)) {}
    std::string json_path;
};

// tokenizer
struct MergeWithoutVocabEntry : Error {
    using Error::Error;
};
struct DuplicateMerge : Error {
    using Error::Error;
};
struct UnencodableByte : Error {
    using Error::Error;
};
struct HeuristicTokenizerForbidden : Error {
    using Error::Error;
};

// ir / operators / pipeline
struct EmptyIr : Error {
    using Error::Error;
};
struct CyclicDependency : Error {
    CyclicDependency(const std::string& msg, std::vector<std::string> cyc)
        : Error(msg), cycle(std::move(cyc)) {}
    std::vector<std::string> cycle;
};
struct BoundPreconditionViolated : Error {
    using Error::Error;
};
struct InvalidDelimiterTable : Error {
    using Error::Error;
};

// compiled-text grammar
struct GrammarError : Error {
    GrammarError(const std::string& msg, int line_no, int col_no)
        : Error(msg + " (line " + std::to_string(line_no) + ", col " +
                std::to_string(col_no) + ")"),
          line(line_no), col(col_no) {}
    int line;
    int col;
};

// metrics
struct UnknownCondition : Error {
    using Error::Error;
};
struct EmptyTranscript : Error {
    using Error::Error;
};
struct MalformedTranscript : Error {
    using Error::Error;
};
struct DegenerateDesign : Error {
    using Error::Error;
};
struct InvalidLengths : Error {
    using Error::Error;
};
struct EmptySamples : Error {
    using Error::Error;
};
struct OutOfRangeP : Error {
    using Error::Error;
};
struct DivisionByZeroBaseline : Error {
    using Error::Error;
};

}  // namespace tscg
