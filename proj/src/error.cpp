#include "zjsc/error.hpp"

namespace zjsc {

const char* to_string(FetchErrorKind kind)
{
    switch (kind) {
    case FetchErrorKind::NotFound: return "NotFound";
    case FetchErrorKind::Io: return "Io";
    case FetchErrorKind::HttpStatus: return "HttpStatus";
    case FetchErrorKind::Timeout: return "Timeout";
    }
    return "?";
}

const char* to_string(TargetErrorKind kind)
{
    switch (kind) {
    case TargetErrorKind::TargetNotFound: return "TargetNotFound";
    case TargetErrorKind::NotAComponent: return "NotAComponent";
    case TargetErrorKind::NoAncestorComponent: return "NoAncestorComponent";
    }
    return "?";
}

std::string join_chain(const std::vector<std::string>& chain)
{
    std::string out;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (i)
            out += " -> ";
        out += chain[i];
    }
    return out;
}

namespace {

std::string fetch_message(FetchErrorKind kind, const std::string& locator, const std::string& detail, int status)
{
    std::string msg = std::string("fetch failed (") + to_string(kind);
    if (kind == FetchErrorKind::HttpStatus)
        msg += " " + std::to_string(status);
    msg += "): " + locator;
    if (!detail.empty())
        msg += ": " + detail;
    return msg;
}

} // namespace

FetchError::FetchError(FetchErrorKind kind, std::string locator, std::string detail, int http_status)
    : Error(fetch_message(kind, locator, detail, http_status)),
      m_kind(kind),
      m_locator(std::move(locator)),
      m_detail(std::move(detail)),
      m_http_status(http_status)
{
}

FetchError FetchError::with_chain(std::vector<std::string> chain) const
{
    FetchError copy = *this;
    copy.m_chain = std::move(chain);
    return copy;
}

CycleError::CycleError(std::vector<std::string> chain)
    : Error("include cycle: " + join_chain(chain)), m_chain(std::move(chain))
{
}

DepthExceeded::DepthExceeded(std::size_t max_depth, std::vector<std::string> chain)
    : Error("include depth exceeds " + std::to_string(max_depth) + ": " + join_chain(chain)),
      m_max_depth(max_depth),
      m_chain(std::move(chain))
{
}

} // namespace zjsc
