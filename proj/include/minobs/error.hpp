#ifndef MINOBS_ERROR_HPP
#define MINOBS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace minobs {

enum class Errc {
    SpecInvalid,
    EmptyTag,
    EmptyEnsemble,
    CapacityExceeded,
    DuplicateSource,
    WindowTooSmall,
    BackactionOutsideComponent,
    ComponentTooSmall,
    NoRecognizedConfigurations,
    IoError,
};

inline const char* errc_name(Errc c)
{
    switch (c) {
    case Errc::SpecInvalid: return "SpecInvalid";
    case Errc::EmptyTag: return "EmptyTag";
    case Errc::EmptyEnsemble: return "EmptyEnsemble";
    case Errc::CapacityExceeded: return "CapacityExceeded";
    case Errc::DuplicateSource: return "DuplicateSource";
    case Errc::WindowTooSmall: return "WindowTooSmall";
    case Errc::BackactionOutsideComponent: return "BackactionOutsideComponent";
    case Errc::ComponentTooSmall: return "ComponentTooSmall";
    case Errc::NoRecognizedConfigurations: return "NoRecognizedConfigurations";
    case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code)
    {
    }

    Errc code() const { return code_; }

private:
    Errc code_;
};

} // namespace minobs

#endif // MINOBS_ERROR_HPP
