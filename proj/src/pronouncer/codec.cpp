#include "ibsim/pronouncer/codec.hpp"

#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace ibsim::pronouncer {

using ojson = nlohmann::ordered_json;

namespace {

ojson parse_line(std::string_view line) {
    try {
        return ojson::parse(line);
    } catch (const ojson::parse_error& e) {
        throw CodecError(std::string("malformed JSON: ") + e.what());
    }
}

void flatten_numbers(const ojson& v, std::vector<double>& out, int depth) {
    if (v.is_number()) {
        out.push_back(v.get<double>());
    } else if (v.is_array() && depth < 2) {
        for (const auto& e : v) flatten_numbers(e, out, depth + 1);
    } else {
        throw CodecError("binding values must be numbers, rows, or lists of rows");
    }
}

}  // namespace

std::string encode_request(const Query& q) {
    ojson bindings = ojson::object();
    for (const auto& [k, v] : q.bindings) bindings[k] = v;
    return ojson{{"template", q.template_id}, {"bindings", bindings}, {"requester", q.requester}}.dump();
}

std::string encode_advice(const Advice& a) {
    ojson values = ojson::object();
    for (const auto& [k, v] : a.action_values) values[k] = v;
    return ojson{{"action", a.action},
                 {"eu", a.expected_utility},
                 {"action_values", values},
                 {"filtered_out", a.filtered_out}}
        .dump();
}

std::string encode_error(const ErrorReply& e) {
    return ojson{{"error", e.code}, {"message", e.message}}.dump();
}

Query decode_request(std::string_view line) {
    const auto j = parse_line(line);
    if (!j.is_object()) throw CodecError("request must be a JSON object");
    for (const auto& [k, _] : j.items()) {
        if (k != "template" && k != "bindings" && k != "requester") throw CodecError("unknown request key " + k);
    }
    if (!j.contains("template") || !j["template"].is_string()) throw CodecError("request.template must be a string");
    if (!j.contains("bindings") || !j["bindings"].is_object()) throw CodecError("request.bindings must be an object");
    Query q;
    q.template_id = j["template"].get<std::string>();
    if (j.contains("requester")) {
        if (!j["requester"].is_string()) throw CodecError("request.requester must be a string");
        q.requester = j["requester"].get<std::string>();
    }
    for (const auto& [slot, value] : j["bindings"].items()) {
        std::vector<double> flat;
        flatten_numbers(value, flat, 0);
        q.bindings.emplace(slot, std::move(flat));
    }
    return q;
}

Reply decode_reply(std::string_view line) {
    const auto j = parse_line(line);
    if (!j.is_object()) throw CodecError("reply must be a JSON object");
    try {
        if (j.contains("error")) return ErrorReply{j.at("error").get<std::string>(), j.value("message", "")};
        Advice a;
        a.action = j.at("action").get<std::string>();
        a.expected_utility = j.at("eu").get<double>();
        for (const auto& [k, v] : j.at("action_values").items()) a.action_values.emplace_back(k, v.get<double>());
        a.filtered_out = j.at("filtered_out").get<std::vector<std::string>>();
        return a;
    } catch (const ojson::exception& e) {
        throw CodecError(std::string("malformed reply: ") + e.what());
    }
}

std::string handle_line(const Pronouncer& p, std::string_view line) {
    try {
        return encode_advice(p.pronounce(decode_request(line)));
    } catch (const CodecError& e) {
        return encode_error({to_string(ErrorCode::bad_request), e.what()});
    } catch (const PronouncerError& e) {
        return encode_error({to_string(e.code()), e.what()});
    } catch (const std::exception& e) {
        return encode_error({"internal", e.what()});
    }
}

std::size_t serve_stream(const Pronouncer& p, std::istream& in, std::ostream& out) {
    std::size_t served = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        out << handle_line(p, line) << '\n' << std::flush;
        ++served;
    }
    return served;
}

namespace {

[[noreturn]] void sys_fail(const std::string& what) {
    throw std::runtime_error(what + ": " + std::strerror(errno));
}

sockaddr_un make_address(const std::filesystem::path& path) {
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    const auto s = path.string();
    if (s.size() >= sizeof(addr.sun_path)) throw std::runtime_error("socket path too long: " + s);
    std::memcpy(addr.sun_path, s.c_str(), s.size() + 1);
    return addr;
}

void write_all(int fd, std::string_view data) {
    while (!data.empty()) {
        const auto n = ::write(fd, data.data(), data.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            sys_fail("write");
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
}

class FdGuard {
public:
    explicit FdGuard(int fd) : fd_(fd) {}
    ~FdGuard() {
        if (fd_ >= 0) ::close(fd_);
    }
    FdGuard(const FdGuard&) = delete;
    FdGuard& operator=(const FdGuard&) = delete;
    [[nodiscard]] int get() const { return fd_; }

private:
    int fd_;
};

}  // namespace

LocalSocketServer::LocalSocketServer(const Pronouncer& p, std::filesystem::path socket_path)
    : pronouncer_(p), path_(std::move(socket_path)) {
    listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
    if (listen_fd_ < 0) sys_fail("socket");
    const auto addr = make_address(path_);
    ::unlink(path_.c_str());
    if (::bind(listen_fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) < 0) {
        ::close(listen_fd_);
        sys_fail("bind " + path_.string());
    }
    if (::listen(listen_fd_, 8) < 0) {
        ::close(listen_fd_);
        sys_fail("listen");
    }
}

LocalSocketServer::~LocalSocketServer() {
    if (listen_fd_ >= 0) ::close(listen_fd_);
    ::unlink(path_.c_str());
}

void LocalSocketServer::serve(std::size_t connections) {
    for (std::size_t c = 0; c < connections; ++c) {
        FdGuard client(::accept(listen_fd_, nullptr, nullptr));
        if (client.get() < 0) sys_fail("accept");
        std::string buffer;
        char chunk[4096];
        for (;;) {
            const auto n = ::read(client.get(), chunk, sizeof(chunk));
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) break;
            buffer.append(chunk, static_cast<std::size_t>(n));
            std::size_t nl;
            while ((nl = buffer.find('\n')) != std::string::npos) {
                std::string line = buffer.substr(0, nl);
                buffer.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                if (line.empty()) continue;
                write_all(client.get(), handle_line(pronouncer_, line) + '\n');
            }
        }
        if (!buffer.empty()) write_all(client.get(), handle_line(pronouncer_, buffer) + '\n');
    }
}

Reply request_over_socket(const std::filesystem::path& socket_path, const Query& q) {
    FdGuard fd(::socket(AF_UNIX, SOCK_STREAM, 0));
    if (fd.get() < 0) sys_fail("socket");
    const auto addr = make_address(socket_path);
    if (::connect(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) < 0) {
        sys_fail("connect " + socket_path.string());
    }
    write_all(fd.get(), encode_request(q) + '\n');
    ::shutdown(fd.get(), SHUT_WR);
    std::string reply;
    char chunk[4096];
    for (;;) {
        const auto n = ::read(fd.get(), chunk, sizeof(chunk));
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        reply.append(chunk, static_cast<std::size_t>(n));
    }
    if (const auto nl = reply.find('\n'); nl != std::string::npos) reply.resize(nl);
    return decode_reply(reply);
}

}  // namespace ibsim::pronouncer
