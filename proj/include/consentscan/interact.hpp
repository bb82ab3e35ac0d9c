#pragma once

#include <string>
#include <vector>

#include "consentscan/browser.hpp"
#include "consentscan/darkpattern.hpp"
#include "consentscan/outcome.hpp"
#include "consentscan/suite.hpp"

namespace consentscan::interaction {

/// Outcome error strings.
inline constexpr const char* renotice_not_found = "renotice_not_found";
inline constexpr const char* reload_failed = "reload_failed";

/// Clicks every button and link of the notice, each on a fresh first visit:
/// clear state, reload, re-detect the notice by the priority chain, find the
/// clickable by text, click, capture. Checkboxes are recorded without clicking.
/// Per-clickable failures are recorded in the outcome; the sequence never aborts.
std::vector<ClickOutcome> interact_all(capture::BrowserSession& session, const std::string& url,
                                       const PageSnapshot& initial, const std::vector<Clickable>& clickables,
                                       const scan::DetectorSuite& suite,
                                       const darkpattern::SsimParams& ssim_params = {});

} // namespace consentscan::interaction
