#ifndef XMAP_ERRORS_HPP
#define XMAP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace xmap {

// Base for all toolkit errors. `kind()` is a stable machine-readable name;
// what() carries the human message (with location where available).
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

#define XMAP_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& msg) : Error(#Name, msg) {}         \
    }

XMAP_DEFINE_ERROR(CycleError);
XMAP_DEFINE_ERROR(UnsupportedConstruct);
XMAP_DEFINE_ERROR(DanglingReference);
XMAP_DEFINE_ERROR(UnknownNode);
XMAP_DEFINE_ERROR(AmbiguousArrow);
XMAP_DEFINE_ERROR(BoxMemberNotSibling);
XMAP_DEFINE_ERROR(DisconnectedGroup);
XMAP_DEFINE_ERROR(UnmappedTargetGroup);
XMAP_DEFINE_ERROR(ValidationError);
XMAP_DEFINE_ERROR(DuplicateId);
XMAP_DEFINE_ERROR(UnboundHeadVariable);
XMAP_DEFINE_ERROR(SyntaxError);
XMAP_DEFINE_ERROR(UnsupportedFeature);
XMAP_DEFINE_ERROR(ConflictingTags);
XMAP_DEFINE_ERROR(UntranslatableQuery);
XMAP_DEFINE_ERROR(MissingRuleSet);

#undef XMAP_DEFINE_ERROR

} // namespace xmap

#endif
