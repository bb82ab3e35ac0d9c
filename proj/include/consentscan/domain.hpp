#pragma once

#include <string>
#include <vector>

namespace consentscan {

/// Lowercased host of an absolute URL, without port or userinfo; empty when absent.
std::string host_of(const std::string& url);

/// eTLD+1 of a host. Uses a small table of multi-label public suffixes
/// (co.uk, com.au, ...); otherwise the last two labels. IP literals and
/// single-label hosts are returned unchanged.
std::string registrable_domain(const std::string& host);

/// The host followed by each parent domain, stopping before the bare TLD:
/// "a.b.example.com" -> {"a.b.example.com", "b.example.com", "example.com"}.
std::vector<std::string> domain_chain(const std::string& host);

/// True when `host` equals `domain` or is a subdomain of it.
bool domain_matches(const std::string& host, const std::string& domain);

} // namespace consentscan
