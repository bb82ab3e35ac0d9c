#include "consentscan/domain.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace consentscan {

namespace {

const std::set<std::string>& multi_label_suffixes()
{
    static const std::set<std::string> s = {
        "co.uk",  "org.uk", "ac.uk",  "gov.uk", "me.uk",  "ltd.uk", "plc.uk", "net.uk", "com.au", "net.au",
        "org.au", "edu.au", "gov.au", "co.nz",  "org.nz", "co.jp",  "ne.jp",  "or.jp",  "ac.jp",  "co.kr",
        "or.kr",  "com.br", "net.br", "org.br", "com.cn", "net.cn", "org.cn", "com.mx", "com.ar", "com.tr",
        "co.in",  "net.in", "org.in", "co.za",  "com.sg", "com.hk", "com.tw", "co.il",  "com.pl", "net.pl",
        "org.pl", "com.es", "com.pt", "co.at",  "or.at",  "gv.at",  "com.ua", "co.id",  "com.my", "com.ph",
    };
    return s;
}

bool is_ip_literal(const std::string& host)
{
    if (host.empty()) return false;
    if (host.front() == '[') return true;
    return std::all_of(host.begin(), host.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '.'; });
}

} // namespace

std::string host_of(const std::string& url)
{
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return {};
    const auto start = scheme_end + 3;
    const auto end = url.find_first_of("/?#", start);
    std::string authority = url.substr(start, end == std::string::npos ? std::string::npos : end - start);
    if (const auto at = authority.rfind('@'); at != std::string::npos) {
        authority = authority.substr(at + 1);
    }
    if (!authority.empty() && authority.front() == '[') {
        const auto close = authority.find(']');
        authority = authority.substr(0, close == std::string::npos ? authority.size() : close + 1);
    } else if (const auto colon = authority.find(':'); colon != std::string::npos) {
        authority = authority.substr(0, colon);
    }
    if (!authority.empty() && authority.back() == '.') authority.pop_back();
    for (auto& c : authority) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return authority;
}

std::string registrable_domain(const std::string& host)
{
    if (is_ip_literal(host)) return host;
    const auto last = host.rfind('.');
    if (last == std::string::npos) return host;
    const auto second = host.rfind('.', last - 1);
    if (second == std::string::npos || last == 0) return host;
    if (multi_label_suffixes().contains(host.substr(second + 1))) {
        const auto third = host.rfind('.', second - 1);
        return second == 0 ? host : host.substr(third == std::string::npos ? 0 : third + 1);
    }
    return host.substr(second + 1);
}

std::vector<std::string> domain_chain(const std::string& host)
{
    std::vector<std::string> out;
    if (host.empty()) return out;
    if (is_ip_literal(host)) return {host};
    const auto stop = registrable_domain(host);
    std::string cur = host;
    while (true) {
        out.push_back(cur);
        if (cur == stop) break;
        const auto dot = cur.find('.');
        if (dot == std::string::npos) break;
        cur = cur.substr(dot + 1);
    }
    return out;
}

bool domain_matches(const std::string& host, const std::string& domain)
{
    if (host == domain) return true;
    return host.size() > domain.size() && host.compare(host.size() - domain.size(), domain.size(), domain) == 0 &&
           host[host.size() - domain.size() - 1] == '.';
}

} // namespace consentscan
