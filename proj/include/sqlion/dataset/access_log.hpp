#pragma once

#include <arpa/inet.h>

#include <chrono>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqlion/codec.hpp"
#include "sqlion/normalize.hpp"

namespace sqlion {

// One line of an Apache combined log:
//   %h %l %u %t "%r" %>s %b "%{Referer}i" "%{User-agent}i"
struct AccessLogRecord {
    std::string client_ip;
    std::int64_t timestamp = 0; // seconds since the epoch, UTC
    std::string method;
    std::string target; // path + query as logged
    std::string protocol;
    int status = 0;
    std::string referer;
    std::string user_agent;
    RawQuery query; // text after '?', percent-decoded once

    friend bool operator==(const AccessLogRecord&, const AccessLogRecord&) = default;
};

inline bool is_valid_ip(const std::string& ip) {
    unsigned char buf[sizeof(struct in6_addr)];
    return inet_pton(AF_INET, ip.c_str(), buf) == 1 || inet_pton(AF_INET6, ip.c_str(), buf) == 1;
}

namespace detail {

class LineCursor {
public:
    explicit LineCursor(std::string_view s) : s_(s) {}

    bool at_end() const { return pos_ >= s_.size(); }

    bool skip_spaces() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
        return pos_ > start;
    }

    std::optional<std::string_view> token() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && s_[pos_] != ' ') ++pos_;
        if (pos_ == start) return std::nullopt;
        return s_.substr(start, pos_ - start);
    }

    std::optional<std::string_view> bracketed() {
        if (at_end() || s_[pos_] != '[') return std::nullopt;
        auto close = s_.find(']', pos_);
        if (close == std::string_view::npos) return std::nullopt;
        auto out = s_.substr(pos_ + 1, close - pos_ - 1);
        pos_ = close + 1;
        return out;
    }

    // A double-quoted field with Apache's escaping undone (\" \\ \xHH).
    std::optional<std::string> quoted() {
        if (at_end() || s_[pos_] != '"') return std::nullopt;
        std::string out;
        for (std::size_t i = pos_ + 1; i < s_.size(); ++i) {
            char c = s_[i];
            if (c == '"') {
                pos_ = i + 1;
                return out;
            }
            if (c == '\\' && i + 1 < s_.size()) {
                char n = s_[i + 1];
                if (n == '"' || n == '\\') {
                    out.push_back(n);
                    ++i;
                    continue;
                }
                if (n == 'x' && i + 3 < s_.size()) {
                    int hi = codec::hex_value(static_cast<unsigned char>(s_[i + 2]));
                    int lo = codec::hex_value(static_cast<unsigned char>(s_[i + 3]));
                    if (hi >= 0 && lo >= 0) {
                        out.push_back(static_cast<char>(hi * 16 + lo));
                        i += 3;
                        continue;
                    }
                }
            }
            out.push_back(c);
        }
        return std::nullopt;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

inline std::optional<int> parse_int(std::string_view s, int digits) {
    if (static_cast<int>(s.size()) != digits) return std::nullopt;
    int v = 0;
    for (char c : s) {
        if (!codec::is_ascii_digit(static_cast<unsigned char>(c))) return std::nullopt;
        v = v * 10 + (c - '0');
    }
    return v;
}

} // namespace detail

/// Parses `10/Oct/2000:13:55:36 -0700` into seconds since the epoch.
inline std::optional<std::int64_t> parse_log_timestamp(std::string_view t) {
    if (t.size() != 26 || t[2] != '/' || t[6] != '/' || t[11] != ':' || t[14] != ':' || t[17] != ':' || t[20] != ' ')
        return std::nullopt;
    static constexpr std::string_view months[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                  "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    unsigned month = 0;
    for (unsigned m = 0; m < 12; ++m) {
        if (t.substr(3, 3) == months[m]) month = m + 1;
    }
    auto day = detail::parse_int(t.substr(0, 2), 2);
    auto year = detail::parse_int(t.substr(7, 4), 4);
    auto hh = detail::parse_int(t.substr(12, 2), 2);
    auto mm = detail::parse_int(t.substr(15, 2), 2);
    auto ss = detail::parse_int(t.substr(18, 2), 2);
    auto off_h = detail::parse_int(t.substr(22, 2), 2);
    auto off_m = detail::parse_int(t.substr(24, 2), 2);
    if (month == 0 || !day || !year || !hh || !mm || !ss || !off_h || !off_m) return std::nullopt;
    if (t[21] != '+' && t[21] != '-') return std::nullopt;
    if (*hh > 23 || *mm > 59 || *ss > 60 || *off_h > 23 || *off_m > 59) return std::nullopt;

    using namespace std::chrono;
    year_month_day ymd{std::chrono::year{*year}, std::chrono::month{month}, std::chrono::day{static_cast<unsigned>(*day)}};
    if (!ymd.ok()) return std::nullopt;
    std::int64_t secs = duration_cast<seconds>(sys_days{ymd}.time_since_epoch()).count() + *hh * 3600 + *mm * 60 + *ss;
    std::int64_t offset = (*off_h * 3600 + *off_m * 60) * (t[21] == '-' ? -1 : 1);
    return secs - offset;
}

/// Parses one combined-format line; nullopt when it does not fit the format.
inline std::optional<AccessLogRecord> parse_access_log_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    detail::LineCursor cur(line);
    AccessLogRecord rec;

    auto host = cur.token();
    if (!host || !cur.skip_spaces()) return std::nullopt;
    rec.client_ip = std::string(*host);
    if (!is_valid_ip(rec.client_ip)) return std::nullopt;
    if (!cur.token() || !cur.skip_spaces()) return std::nullopt; // %l
    if (!cur.token() || !cur.skip_spaces()) return std::nullopt; // %u

    auto when = cur.bracketed();
    if (!when || !cur.skip_spaces()) return std::nullopt;
    auto ts = parse_log_timestamp(*when);
    if (!ts || *ts <= 0) return std::nullopt;
    rec.timestamp = *ts;

    auto request = cur.quoted();
    if (!request || !cur.skip_spaces()) return std::nullopt;
    // The target may itself contain spaces when a client sent them raw.
    std::string_view req(*request);
    auto first_space = req.find(' ');
    auto last_space = req.rfind(' ');
    if (first_space == std::string_view::npos || first_space == last_space) return std::nullopt;
    rec.method = std::string(req.substr(0, first_space));
    rec.protocol = std::string(req.substr(last_space + 1));
    if (rec.method.empty() || rec.protocol.rfind("HTTP/", 0) != 0) return std::nullopt;
    rec.target = std::string(req.substr(first_space + 1, last_space - first_space - 1));
    if (rec.target.empty()) return std::nullopt;

    auto status = cur.token();
    if (!status || status->size() != 3 || !cur.skip_spaces()) return std::nullopt;
    auto st = detail::parse_int(*status, 3);
    if (!st) return std::nullopt;
    rec.status = *st;

    auto bytes = cur.token();
    if (!bytes || !cur.skip_spaces()) return std::nullopt;
    if (*bytes != "-") {
        for (char c : *bytes)
            if (!codec::is_ascii_digit(static_cast<unsigned char>(c))) return std::nullopt;
    }

    auto referer = cur.quoted();
    if (!referer || !cur.skip_spaces()) return std::nullopt;
    rec.referer = *referer;
    auto agent = cur.quoted();
    if (!agent) return std::nullopt;
    rec.user_agent = *agent;
    cur.skip_spaces();
    if (!cur.at_end()) return std::nullopt;

    auto q = rec.target.find('?');
    if (q != std::string::npos) rec.query.text = codec::percent_decode(std::string_view(rec.target).substr(q + 1));
    rec.query.source = "access-log";
    return rec;
}

struct AccessLogParse {
    std::vector<AccessLogRecord> records;
    std::size_t malformed = 0;
};

/// Parses a whole log stream, skipping (and counting) lines that do not fit.
/// Blank lines are ignored.
inline AccessLogParse parse_access_log(std::istream& in) {
    AccessLogParse out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        if (auto rec = parse_access_log_line(line))
            out.records.push_back(std::move(*rec));
        else
            ++out.malformed;
    }
    return out;
}

} // namespace sqlion
