#pragma once

#include <stdexcept>
#include <string>

namespace slantlab {

// All tool-level failures derive from Error so the CLI can map them to exit codes.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct SyntaxError : Error {
    std::size_t offset;
    SyntaxError(std::size_t off, const std::string& msg)
        : Error("syntax error at byte " + std::to_string(off) + ": " + msg), offset(off) {}
};

struct UnknownIdentifier : Error {
    std::string name;
    UnknownIdentifier(const std::string& id, std::size_t off)
        : Error("unknown identifier '" + id + "' at byte " + std::to_string(off)), name(id) {}
};

struct DomainError : Error {
    std::string subexpr;
    DomainError(const std::string& what, const std::string& sub)
        : Error(what + " in '" + sub + "'"), subexpr(sub) {}
};

struct PointOutsideChart : Error {
    explicit PointOutsideChart(const std::string& msg) : Error(msg) {}
};

struct WrongMetricModel : Error {
    explicit WrongMetricModel(const std::string& msg) : Error(msg) {}
};

struct NotLocallyProduct : Error {
    explicit NotLocallyProduct(const std::string& msg) : Error(msg) {}
};

struct ImmersionDegenerate : Error {
    explicit ImmersionDegenerate(const std::string& msg) : Error(msg) {}
};

struct ClusterAmbiguity : Error {
    explicit ClusterAmbiguity(const std::string& msg) : Error(msg) {}
};

struct NotWellDefined : Error {
    explicit NotWellDefined(const std::string& msg) : Error(msg) {}
};

struct HypothesisNotMet : Error {
    explicit HypothesisNotMet(const std::string& msg) : Error(msg) {}
};

struct ValidationError : Error {
    std::string field;
    ValidationError(const std::string& fld, const std::string& msg)
        : Error("invalid manifest field '" + fld + "': " + msg), field(fld) {}
};

}  // namespace slantlab
