#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "ibsim/pronouncer/template.hpp"

namespace ibsim::pronouncer {

enum class ErrorCode {
    unknown_template,
    duplicate_template,
    invalid_skeleton,
    invalid_filter,
    missing_binding,
    extra_binding,
    bad_binding,
    invalid_diagram,
    no_admissible_action,
    bad_request,
};

[[nodiscard]] const char* to_string(ErrorCode c);

class PronouncerError : public std::runtime_error {
public:
    PronouncerError(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

struct Query {
    std::string template_id;
    Bindings bindings;
    std::string requester;
};

struct Advice {
    std::string action;
    double expected_utility = 0.0;
    std::vector<std::pair<std::string, double>> action_values;
    std::vector<std::string> filtered_out;

    friend bool operator==(const Advice&, const Advice&) = default;
};

struct BenchStats {
    std::size_t runs = 0;
    double mean_ms = 0.0;
    double stddev_ms = 0.0;  // sample standard deviation; 0 when runs == 1
};

/// Template registry plus evaluation entry point. Registration takes a write
/// lock; entries never change afterwards, so pronounce() and benchmark() are
/// safe from any number of threads.
class Pronouncer {
public:
    /// Throws PronouncerError: duplicate_template, invalid_skeleton,
    /// invalid_filter.
    std::string register_template(TemplateModel t, NormFilter filter = {});

    [[nodiscard]] bool has_template(const std::string& id) const;
    [[nodiscard]] std::vector<std::string> template_ids() const;
    [[nodiscard]] std::shared_ptr<const TemplateModel> find_template(const std::string& id) const;

    /// Bind, validate, evaluate, filter, pick. Throws PronouncerError.
    [[nodiscard]] Advice pronounce(const Query& q) const;

    /// Times `runs` bind+evaluate cycles after `warmup` discarded ones.
    [[nodiscard]] BenchStats benchmark(const std::string& template_id, const Bindings& bindings, std::size_t runs,
                                       std::size_t warmup = 0) const;

private:
    struct Entry {
        TemplateModel model;
        NormFilter filter;
    };

    [[nodiscard]] std::shared_ptr<const Entry> lookup(const std::string& id) const;
    [[nodiscard]] static Advice advise(const Entry& e, const Bindings& bindings);

    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<const Entry>> registry_;
};

/// Pronouncer with the heating template already registered.
[[nodiscard]] std::unique_ptr<Pronouncer> make_default_pronouncer();

/// Mean and sample standard deviation (n-1) in the input's units.
[[nodiscard]] BenchStats summarize(const std::vector<double>& samples_ms);

}  // namespace ibsim::pronouncer
