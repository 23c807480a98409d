#pragma once

// Newline-delimited JSON messages for the pronouncer boundary.
//
//   request:  {"template": id, "bindings": {slot: number | [numbers] | [[numbers]]}, "requester": id}
//   response: {"action": label, "eu": number, "action_values": {label: number}, "filtered_out": [labels]}
//   error:    {"error": code, "message": text}
//
// One message per line, UTF-8, no embedded newlines. Nested rows in a
// binding are flattened row by row.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "ibsim/pronouncer/pronouncer.hpp"

namespace ibsim::pronouncer {

class CodecError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ErrorReply {
    std::string code;
    std::string message;

    friend bool operator==(const ErrorReply&, const ErrorReply&) = default;
};

using Reply = std::variant<Advice, ErrorReply>;

/// Encoders return a single line without the trailing newline.
[[nodiscard]] std::string encode_request(const Query& q);
[[nodiscard]] std::string encode_advice(const Advice& a);
[[nodiscard]] std::string encode_error(const ErrorReply& e);

/// Decoders throw CodecError on malformed input.
[[nodiscard]] Query decode_request(std::string_view line);
[[nodiscard]] Reply decode_reply(std::string_view line);

/// Decode, pronounce, encode. Never throws; failures become error replies.
[[nodiscard]] std::string handle_line(const Pronouncer& p, std::string_view line);

/// Answers every non-empty line of `in` on `out`. Returns the number of
/// requests served.
std::size_t serve_stream(const Pronouncer& p, std::istream& in, std::ostream& out);

/// Optional local transport: a Unix-domain stream socket carrying the same
/// lines. Connections are served one at a time on the calling thread.
class LocalSocketServer {
public:
    LocalSocketServer(const Pronouncer& p, std::filesystem::path socket_path);
    ~LocalSocketServer();
    LocalSocketServer(const LocalSocketServer&) = delete;
    LocalSocketServer& operator=(const LocalSocketServer&) = delete;

    /// Accepts and serves `connections` clients, then returns.
    void serve(std::size_t connections);

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

private:
    const Pronouncer& pronouncer_;
    std::filesystem::path path_;
    int listen_fd_ = -1;
};

/// Client side of LocalSocketServer: sends one request, waits for one reply.
[[nodiscard]] Reply request_over_socket(const std::filesystem::path& socket_path, const Query& q);

}  // namespace ibsim::pronouncer
