#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace agro {

/// Base of every error thrown by the toolkit. `category()` is the short tag
/// the CLI prints in front of the message.
class Error : public std::runtime_error {
public:
    Error(std::string_view category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    std::string_view category() const noexcept { return category_; }

private:
    std::string_view category_;
};

#define AGRO_DEFINE_ERROR(Name, tag)                                    \
    class Name : public Error {                                          \
    public:                                                              \
        explicit Name(const std::string& what) : Error(tag, what) {}     \
    }

AGRO_DEFINE_ERROR(ConfigError, "config");
AGRO_DEFINE_ERROR(ShapeError, "shape");
AGRO_DEFINE_ERROR(IndexError, "index");
AGRO_DEFINE_ERROR(StateError, "state");
AGRO_DEFINE_ERROR(DataError, "data");
AGRO_DEFINE_ERROR(DomainError, "domain");
AGRO_DEFINE_ERROR(UsageError, "usage");

#undef AGRO_DEFINE_ERROR

}  // namespace agro
