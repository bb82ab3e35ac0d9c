#include "consentscan/browser.hpp"

namespace consentscan::capture {

void CaptureConfig::validate() const
{
    if (settle_wait.count() < 0 || settle_wait >= page_timeout) {
        throw std::invalid_argument("settle_wait must be non-negative and shorter than page_timeout");
    }
    if (viewport.width_px <= 0 || viewport.height_px <= 0) {
        throw std::invalid_argument("viewport dimensions must be positive");
    }
    if (recycle_after < 1) {
        throw std::invalid_argument("recycle_after must be at least 1");
    }
}

std::string to_string(CaptureErrorKind k)
{
    switch (k) {
    case CaptureErrorKind::dns_unresolved: return "dns_unresolved";
    case CaptureErrorKind::unreachable: return "unreachable";
    case CaptureErrorKind::timeout: return "timeout";
    case CaptureErrorKind::scanner_failure: return "scanner_failure";
    }
    return "scanner_failure";
}

CaptureErrorKind parse_capture_error_kind(const std::string& s)
{
    if (s == "dns_unresolved") return CaptureErrorKind::dns_unresolved;
    if (s == "unreachable") return CaptureErrorKind::unreachable;
    if (s == "timeout") return CaptureErrorKind::timeout;
    if (s == "scanner_failure") return CaptureErrorKind::scanner_failure;
    throw std::invalid_argument("unknown capture error kind: " + s);
}

std::string to_string(ClickError::Kind k)
{
    return k == ClickError::Kind::element_not_found ? "element_not_found" : "click_failed";
}

} // namespace consentscan::capture
