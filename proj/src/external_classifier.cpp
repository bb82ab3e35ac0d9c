#include "external_classifier.hpp"

#include <mutex>

#include <boost/process.hpp>
#include <nlohmann/json.hpp>

#include "consentscan/http_client.hpp"

namespace consentscan::textclass {

namespace bp = boost::process;

namespace {

/// Long-lived child process: one JSON string per line in, one score per line out.
class LineProtocolClassifier final : public Classifier {
public:
    explicit LineProtocolClassifier(const ClassifierModel& model) : threshold_(model.threshold)
    {
        auto exe = std::filesystem::path(model.command.front());
        boost::filesystem::path program;
        if (exe.has_parent_path()) {
            program = (exe.is_absolute() ? exe : model.base_dir / exe).string();
        } else {
            program = bp::search_path(exe.string());
            if (program.empty()) {
                throw ModelError("external model command not found: " + exe.string());
            }
        }
        const std::vector<std::string> args(model.command.begin() + 1, model.command.end());
        const auto dir = model.base_dir.empty() ? std::filesystem::current_path() : model.base_dir;
        try {
            child_ = bp::child(program, bp::args(args), bp::std_in < to_child_, bp::std_out > from_child_,
                               bp::start_dir(dir.string()));
        } catch (const bp::process_error& e) {
            throw ModelError(std::string("cannot start external model: ") + e.what());
        }
    }

    ~LineProtocolClassifier() override
    {
        to_child_.pipe().close();
        std::error_code ec;
        if (!child_.wait_for(std::chrono::seconds(2), ec)) {
            child_.terminate(ec);
        }
    }

    double score(const std::string& text) override
    {
        std::lock_guard lock(mutex_);
        to_child_ << encode_request_line(text) << '\n' << std::flush;
        std::string line;
        if (!std::getline(from_child_, line)) {
            throw ModelError("external model closed its output");
        }
        return parse_score_line(line);
    }

    double threshold() const override { return threshold_; }

private:
    double threshold_;
    std::mutex mutex_;
    bp::opstream to_child_;
    bp::ipstream from_child_;
    bp::child child_;
};

/// POST {"texts": [...]} -> {"scores": [...]}.
class HttpClassifier final : public Classifier {
public:
    explicit HttpClassifier(const ClassifierModel& model) : endpoint_(model.endpoint), threshold_(model.threshold) {}

    double score(const std::string& text) override
    {
        const nlohmann::json req = {{"texts", {text}}};
        http::Response res;
        try {
            res = http::post(endpoint_, req.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace),
                             "application/json");
        } catch (const http::HttpError& e) {
            throw ModelError(e.what());
        }
        if (res.status != 200) {
            throw ModelError("external model endpoint returned HTTP " + std::to_string(res.status));
        }
        try {
            const auto body = nlohmann::json::parse(res.body);
            const double s = body.at("scores").at(0).get<double>();
            if (!(s >= 0.0 && s <= 1.0)) throw ModelError("score out of range");
            return s;
        } catch (const nlohmann::json::exception& e) {
            throw ModelError(std::string("malformed external model response: ") + e.what());
        }
    }

    double threshold() const override { return threshold_; }

private:
    std::string endpoint_;
    double threshold_;
};

} // namespace

std::unique_ptr<Classifier> make_external_classifier(const ClassifierModel& model)
{
    if (!model.command.empty()) {
        return std::make_unique<LineProtocolClassifier>(model);
    }
    return std::make_unique<HttpClassifier>(model);
}

} // namespace consentscan::textclass
