// Command-line front end. Links against the C interface only, so it doubles
// as a smoke test of the shared-library surface.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polydina/polydina_c.h"

namespace {

// exit codes (documented in the README)
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitModuleError = 2;
constexpr int kExitNotIdentifiable = 3;
constexpr int kExitUndetermined = 4;

struct StringOut {
    char* text = nullptr;
    ~StringOut() { polydina_string_free(text); }
    std::string str() const { return text ? std::string(text) : std::string(); }
};

struct QHandle {
    polydina_q* q = nullptr;
    ~QHandle() { polydina_q_free(q); }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("failed writing file: " + path);
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (const char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out;
}

// Raised for failures of C-API calls; carries the status code.
struct ApiError : std::runtime_error {
    int code;
    ApiError(int code_, std::string msg) : std::runtime_error(std::move(msg)), code(code_) {}
};

void check_status(int status) {
    if (status != POLYDINA_OK) throw ApiError(status, polydina_last_error());
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << '\n';
    } else {
        write_file(out_path, text);
    }
}

struct CommonArgs {
    std::string model = "seq";
    std::string q_path;
    std::string params_path;
    std::string data_path;
    std::string out_path;
    std::string kind;
    std::uint64_t n = 1000;
    std::uint64_t seed = 1;
    int starts = 1;
    double eps = 0.01;
    bool json_errors = false;
    int max_iter = 0;   // 0 = library default
    double tol = 0.0;   // 0 = library default
};

QHandle parse_q(const CommonArgs& args) {
    QHandle handle;
    const std::string csv = read_file(args.q_path);
    check_status(polydina_q_parse(csv.c_str(), args.model.c_str(), &handle.q));
    return handle;
}

std::string params_or_empty(const CommonArgs& args) {
    return args.params_path.empty() ? std::string() : read_file(args.params_path);
}

int run(int argc, char** argv) {
    CLI::App app{"polydina: polytomous cognitive-diagnosis models, Q-matrix identifiability "
                 "checks, counterexample constructions, rank tests and EM estimation"};
    app.require_subcommand(1);
    CommonArgs args;

    auto add_common = [&](CLI::App* cmd, bool needs_q) {
        cmd->add_option("--model", args.model, "Model kind: gpdina or seq")
            ->check(CLI::IsMember({"gpdina", "seq"}));
        if (needs_q)
            cmd->add_option("--q", args.q_path, "Q-matrix CSV path")->required();
        cmd->add_flag("--json", args.json_errors, "Emit errors as JSON on stdout");
        cmd->add_option("--out", args.out_path, "Write the main output to this path");
    };

    auto* c_check = app.add_subcommand("check", "Identifiability conditions and verdict");
    add_common(c_check, true);

    auto* c_tmatrix =
        app.add_subcommand("tmatrix", "Marginal-probability matrix (T / T^s) as CSV");
    add_common(c_tmatrix, true);
    c_tmatrix->add_option("--params", args.params_path, "Parameter JSON path (default: random)");
    c_tmatrix->add_option("--seed", args.seed, "Seed for random parameters");

    auto* c_simulate = app.add_subcommand("simulate", "Sample respondents from a parameter set");
    add_common(c_simulate, true);
    c_simulate->add_option("--params", args.params_path, "Parameter JSON path (default: random)");
    c_simulate->add_option("--n", args.n, "Number of respondents");
    c_simulate->add_option("--seed", args.seed, "Sampling seed");

    auto* c_fit = app.add_subcommand("fit", "EM estimation from response data");
    add_common(c_fit, true);
    c_fit->add_option("--data", args.data_path, "Response CSV path")->required();
    c_fit->add_option("--params", args.params_path, "Initial parameter JSON (default: random)");
    c_fit->add_option("--seed", args.seed, "Seed for the random start");
    c_fit->add_option("--starts", args.starts,
                      "With >= 2: run that many random starts and report the fitted-parameter "
                      "clusters instead of a single fit");
    c_fit->add_option("--max-iter", args.max_iter, "Maximum EM iterations");
    c_fit->add_option("--tol", args.tol, "Log-likelihood gain stopping threshold");

    auto* c_convert =
        app.add_subcommand("convert", "Map parameters across the model equivalence");
    add_common(c_convert, true);
    c_convert->add_option("--params", args.params_path, "Parameter JSON path")->required();

    auto* c_counter =
        app.add_subcommand("counterexample", "Construct and verify a counterexample pair");
    add_common(c_counter, true);
    c_counter
        ->add_option("--kind", args.kind,
                     "Construction kind: C1, C2, C3, S1_zero_guess, NotId1, NotId2, S2star, "
                     "S3star")
        ->required();
    c_counter->add_option("--eps", args.eps, "Pinned perturbation size");
    c_counter->add_option("--params", args.params_path, "Base parameter JSON (default: random)");
    c_counter->add_option("--seed", args.seed, "Seed for random base parameters");

    auto* c_rank = app.add_subcommand("rank", "Finite-difference Jacobian rank test");
    add_common(c_rank, true);
    c_rank->add_option("--params", args.params_path, "Parameter JSON path (default: random)");
    c_rank->add_option("--seed", args.seed, "Seed for random parameters");

    auto* c_datasets = app.add_subcommand("datasets", "Write the bundled Q-matrix files");
    c_datasets->add_flag("--json", args.json_errors, "Emit errors as JSON on stdout");
    c_datasets->add_option("--out", args.out_path, "Output directory (default: .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (c_check->parsed()) {
            QHandle q = parse_q(args);
            StringOut json;
            int verdict = POLYDINA_VERDICT_UNDETERMINED;
            check_status(polydina_check(q.q, &json.text, &verdict));
            emit(json.str(), args.out_path);
            if (verdict == POLYDINA_VERDICT_IDENTIFIABLE) return kExitOk;
            return verdict == POLYDINA_VERDICT_NOT_IDENTIFIABLE ? kExitNotIdentifiable
                                                                : kExitUndetermined;
        }
        if (c_tmatrix->parsed()) {
            QHandle q = parse_q(args);
            std::string params = params_or_empty(args);
            if (params.empty()) {
                StringOut drawn;
                check_status(
                    polydina_random_params(q.q, args.model.c_str(), args.seed, &drawn.text));
                params = drawn.str();
            }
            StringOut csv;
            check_status(polydina_tmatrix_csv(q.q, params.c_str(), &csv.text));
            emit(csv.str(), args.out_path);
            return kExitOk;
        }
        if (c_simulate->parsed()) {
            QHandle q = parse_q(args);
            std::string params = params_or_empty(args);
            if (params.empty()) {
                StringOut drawn;
                check_status(
                    polydina_random_params(q.q, args.model.c_str(), args.seed, &drawn.text));
                params = drawn.str();
            }
            StringOut csv;
            check_status(polydina_simulate_csv(q.q, params.c_str(),
                                               static_cast<size_t>(args.n), args.seed,
                                               &csv.text));
            if (args.out_path.empty()) {
                std::cout << csv.str();
            } else {
                write_file(args.out_path, csv.str());
                std::cout << "{\"model\": \"" << args.model << "\", \"n\": " << args.n
                          << ", \"seed\": " << args.seed << ", \"out\": \""
                          << json_escape(args.out_path) << "\"}\n";
            }
            return kExitOk;
        }
        if (c_fit->parsed()) {
            QHandle q = parse_q(args);
            const std::string data = read_file(args.data_path);
            StringOut json;
            if (args.starts > 1) {
                check_status(polydina_probe(q.q, data.c_str(), args.starts, args.seed,
                                            args.max_iter, args.tol, &json.text));
            } else {
                const std::string init = params_or_empty(args);
                check_status(polydina_fit(q.q, data.c_str(),
                                          init.empty() ? nullptr : init.c_str(), args.seed,
                                          args.max_iter, args.tol, &json.text));
            }
            emit(json.str(), args.out_path);
            return kExitOk;
        }
        if (c_convert->parsed()) {
            QHandle q = parse_q(args);
            const std::string params = read_file(args.params_path);
            StringOut json;
            check_status(polydina_convert(q.q, params.c_str(), &json.text));
            emit(json.str(), args.out_path);
            return kExitOk;
        }
        if (c_counter->parsed()) {
            QHandle q = parse_q(args);
            const std::string base = params_or_empty(args);
            StringOut json;
            check_status(polydina_counterexample(q.q, args.kind.c_str(), args.eps,
                                                 base.empty() ? nullptr : base.c_str(),
                                                 args.seed, &json.text));
            emit(json.str(), args.out_path);
            return kExitOk;
        }
        if (c_rank->parsed()) {
            QHandle q = parse_q(args);
            const std::string params = params_or_empty(args);
            StringOut json;
            check_status(polydina_rank(q.q, params.empty() ? nullptr : params.c_str(),
                                       args.seed, &json.text));
            emit(json.str(), args.out_path);
            return kExitOk;
        }
        if (c_datasets->parsed()) {
            const std::string dir = args.out_path.empty() ? "." : args.out_path;
            const std::vector<std::pair<std::string, std::string>> names = {
                {"pisa2000", dir + "/pisa2000_q.csv"}, {"timss2007", dir + "/timss2007_q.csv"}};
            std::string written = "[";
            for (const auto& [key, path] : names) {
                StringOut csv;
                check_status(polydina_dataset(key.c_str(), &csv.text));
                write_file(path, csv.str());
                if (written.size() > 1) written += ", ";
                written += "\"" + json_escape(path) + "\"";
            }
            written += "]";
            std::cout << "{\"written\": " << written << "}\n";
            return kExitOk;
        }
    } catch (const ApiError& e) {
        if (args.json_errors)
            std::cout << "{\"error\": {\"code\": " << e.code << ", \"message\": \""
                      << json_escape(e.what()) << "\"}}\n";
        else
            std::cerr << "error: " << e.what() << "\n";
        return kExitModuleError;
    } catch (const std::exception& e) {
        if (args.json_errors)
            std::cout << "{\"error\": {\"code\": " << POLYDINA_ERR_IO << ", \"message\": \""
                      << json_escape(e.what()) << "\"}}\n";
        else
            std::cerr << "error: " << e.what() << "\n";
        return kExitModuleError;
    }
    return kExitUsage;
}

} // namespace

int main(int argc, char** argv) { return run(argc, argv); }
