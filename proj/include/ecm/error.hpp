#ifndef ECM_ERROR_HPP
#define ECM_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecm
{

/// Stable, machine-readable failure categories shared by every module and the CLI.
enum class ErrorCode { domain, convergence, degeneracy, membership, resource, accuracy };

inline std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::domain: return "DOMAIN";
    case ErrorCode::convergence: return "CONVERGENCE";
    case ErrorCode::degeneracy: return "DEGENERACY";
    case ErrorCode::membership: return "MEMBERSHIP";
    case ErrorCode::resource: return "RESOURCE";
    case ErrorCode::accuracy: return "ACCURACY";
    }
    return "UNKNOWN";
}

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace ecm

#endif
