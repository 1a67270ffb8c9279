// entacc: command-line front end.
//
// Exit codes: 0 pass, 1 certified violation or infeasible, 2 usage error,
// 3 indeterminate (optimizer brackets too wide to decide).

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "entacc/accounting.hpp"
#include "entacc/entropy.hpp"
#include "entacc/json_io.hpp"
#include "entacc/protocols.hpp"

using namespace entacc;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIndeterminate = 3;

struct Globals {
    std::uint64_t seed = 0;
    double gap_tol = 1e-6;
    int max_iters = 2000;
    int restarts = 16;
    std::size_t max_dim = kDefaultMaxDim;
    std::string format = "json";
    bool no_meta = false;
    bool verbose = false;
    std::string config_file;

    OptimizerConfig optimizer() const {
        OptimizerConfig c;
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            if (!in) throw std::invalid_argument("cannot open config file " + config_file);
            c = config_from_json(Json::parse(in));
        }
        c.gap_tol = gap_tol;
        c.max_iters = max_iters;
        c.restarts = restarts;
        c.seed = seed;
        c.validate();
        return c;
    }
};

std::string fmt(double v) {
    std::ostringstream out;
    out << std::setprecision(12) << v;
    return out.str();
}

PureState parse_state(const std::string& spec, std::optional<double> alpha2, std::size_t max_dim) {
    if (!spec.empty() && spec.front() == '{') return state_from_json(Json::parse(spec), max_dim);
    if (std::filesystem::exists(spec)) {
        std::ifstream in(spec);
        return state_from_json(Json::parse(in), max_dim);
    }
    auto with_cap = [&](const PureState& s) { return PureState(s.layout().with_max_dim(max_dim), s.amplitudes()); };
    auto trailing = [&](const std::string& prefix, double fallback) -> double {
        const auto rest = spec.substr(prefix.size());
        if (rest.empty()) return fallback;
        std::size_t used = 0;
        const int n = std::stoi(rest, &used);
        if (used != rest.size()) throw std::invalid_argument("bad state spec: " + spec);
        return n;
    };
    if (spec.rfind("ghz", 0) == 0) {
        const double n = trailing("ghz", 3);
        return with_cap(make_named_state("ghz", std::vector<double>{n}));
    }
    if (spec.rfind("product", 0) == 0) {
        const double n = trailing("product", 3);
        return with_cap(make_named_state("product_zero", std::vector<double>{n},
                                         default_party_labels(static_cast<std::size_t>(n))));
    }
    if (spec == "phi1" || spec == "phi2") {
        if (!alpha2) throw std::invalid_argument(spec + " needs --alpha2");
        if (*alpha2 < 0.0 || *alpha2 > 1.0) throw std::invalid_argument("--alpha2 must lie in [0, 1]");
        return with_cap(make_named_state(spec, std::vector<double>{std::sqrt(*alpha2)}));
    }
    return with_cap(make_named_state(spec));
}

std::vector<std::string> split_labels(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

Json meta_block(const std::string& command, double elapsed) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream stamp;
    stamp << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
    return {{"tool", "entacc"}, {"command", command}, {"timestamp", stamp.str()}, {"elapsed_s", elapsed}};
}

void emit(const Globals& g, Json report, const std::vector<std::vector<std::string>>& csv, const std::string& command,
          double elapsed) {
    if (g.format == "csv") {
        for (const auto& row : csv) {
            for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? "," : "") << row[i];
            std::cout << '\n';
        }
        return;
    }
    if (!g.no_meta) report["meta"] = meta_block(command, elapsed);
    std::cout << report.dump(2) << '\n';
}

std::vector<Partition> default_splits(const std::vector<std::string>& parties) {
    std::vector<Partition> out;
    if (parties.size() < 3) return out;
    for (const auto& x : parties) {
        std::vector<std::string> rest;
        for (const auto& y : parties)
            if (y != x) rest.push_back(y);
        out.push_back(Partition({{x}, rest}));
    }
    return out;
}

struct AuditOutcome {
    Json json = Json::array();
    int code = kExitPass;
    int checks = 0;
    int indeterminate = 0;
    int violations = 0;
};

AuditOutcome audit_all(const LedgerReport& ledger, const std::vector<Partition>& splits) {
    AuditOutcome out;
    for (const auto& split : splits) {
        const auto a = audit_protocol(ledger, split);
        out.json.push_back(audit_to_json(a));
        out.checks += a.ree_checks;
        out.indeterminate += a.indeterminate;
        out.violations += a.violations;
    }
    if (out.violations) out.code = kExitViolation;
    else if (out.indeterminate) out.code = kExitIndeterminate;
    return out;
}

std::vector<std::vector<std::string>> ledger_csv(const LedgerReport& ledger) {
    std::vector<std::string> header{"row", "step", "branches", "total_probability", "ledger_ebits"};
    for (const auto& g : ledger.groups) {
        std::string name = "S_";
        for (const auto& p : g) name += p;
        header.push_back(name);
    }
    for (const auto& t : ledger.targets) {
        header.push_back("E[" + t.to_string() + "].lower");
        header.push_back("E[" + t.to_string() + "].upper");
    }
    std::vector<std::vector<std::string>> rows{header};
    for (const auto& r : ledger.rows) {
        std::vector<std::string> row{std::to_string(r.row), "\"" + r.description + "\"", std::to_string(r.branches.size()),
                                     fmt(r.total_probability), fmt(r.ledger_ebits)};
        for (auto s : r.entropy) row.push_back(fmt(s));
        for (std::size_t t = 0; t < ledger.targets.size(); ++t) {
            row.push_back(r.has_ree ? fmt(r.ree[t].lower) : "");
            row.push_back(r.has_ree ? fmt(r.ree[t].upper) : "");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiparty entanglement accounting: LOCC ledgers, relative entropy of entanglement, rates"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "Seed for optimizer restarts and random protocols");
    app.add_option("--gap-tol", g.gap_tol, "Frank-Wolfe gap tolerance in bits");
    app.add_option("--max-iters", g.max_iters, "Frank-Wolfe iteration budget");
    app.add_option("--restarts", g.restarts, "Random starts per oracle call");
    app.add_option("--max-dim", g.max_dim, "Joint dimension cap");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--no-meta", g.no_meta, "Omit timestamps so reports are byte-identical across runs");
    app.add_option("--config", g.config_file, "Optimizer config JSON");
    app.add_flag("-v,--verbose", g.verbose, "Progress on stderr");

    std::string state_spec;
    std::optional<double> alpha2;
    std::string pair, partition_text;

    auto* measure = app.add_subcommand("measure", "Entropies and E_r / E_Sigma of a state");
    measure->add_option("--state", state_spec, "Named state (ghz3, singlet, phi1, ...) or JSON file")->required();
    measure->add_option("--alpha2", alpha2, "alpha^2 for phi1 / phi2");
    measure->add_option("--pair", pair, "Two parties, e.g. B,C");
    measure->add_option("--partition", partition_text, "Partition such as A|B,C");
    bool with_model = false;
    measure->add_flag("--with-model", with_model, "Include the separable certificate");

    std::string protocol_file;
    bool audit = false;
    std::vector<std::string> split_texts;
    int rounds = 3;
    auto* run_cmd = app.add_subcommand("run", "Execute a protocol and print its ledger");
    run_cmd->add_option("protocol", protocol_file, "Protocol JSON file, or 'fuzz' for a random protocol")->required();
    run_cmd->add_flag("--audit", audit, "Audit the inequalities");
    run_cmd->add_option("--split", split_texts, "Audit split such as A|B,C (repeatable)");
    run_cmd->add_option("--rounds", rounds, "Rounds for 'fuzz'")->check(CLI::PositiveNumber);
    bool emit_protocol = false;
    run_cmd->add_flag("--emit-protocol", emit_protocol, "Include the executed protocol in the report");

    auto* rates = app.add_subcommand("rates", "GHZ / singlet extraction rates");
    rates->add_option("--state", state_spec, "Named state or JSON file")->required();
    rates->add_option("--alpha2", alpha2, "alpha^2 for phi1 / phi2");

    int copies = 6;
    auto* concentrate = app.add_subcommand("concentrate", "Collective concentration of phi1 copies");
    concentrate->add_option("--alpha2", alpha2, "alpha^2")->required();
    concentrate->add_option("--n", copies, "Number of copies (1..8)");

    int count = 50;
    std::size_t parties = 3;
    auto* fuzz = app.add_subcommand("fuzz", "Random protocols audited under every one-vs-rest split");
    fuzz->add_option("--count", count, "Number of protocols")->check(CLI::PositiveNumber);
    fuzz->add_option("--rounds", rounds, "Maximum rounds per protocol")->check(CLI::PositiveNumber);
    fuzz->add_option("--parties", parties, "3 or 4 parties")->check(CLI::IsMember({3, 4}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&]() { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

    OptimizerConfig config;
    try {
        config = g.optimizer();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    Json provenance = {{"seed", g.seed}, {"optimizer", config_to_json(config)}, {"max_dim", g.max_dim}};

    try {
        if (*measure) {
            const auto state = parse_state(state_spec, alpha2, g.max_dim);
            std::optional<Partition> part;
            if (!pair.empty() && !partition_text.empty()) throw std::invalid_argument("use --pair or --partition, not both");
            if (!pair.empty()) {
                const auto labels = split_labels(pair);
                if (labels.size() != 2) throw std::invalid_argument("--pair needs two parties");
                part = Partition({{labels[0]}, {labels[1]}});
            } else if (!partition_text.empty()) {
                part = Partition::parse(partition_text);
            } else if (state.layout().party_count() >= 2) {
                part = Partition::finest(state.layout().parties());
            }
            Json report = {{"command", "measure"}, {"state", state_spec}, {"provenance", provenance}};
            Json entropies = Json::object();
            std::vector<std::vector<std::string>> csv{{"quantity", "value"}};
            for (const auto& x : state.layout().parties()) {
                const double s = von_neumann_entropy(partial_trace(state, {x}));
                entropies[x] = s;
                csv.push_back({"S_" + x, fmt(s)});
            }
            report["entropies"] = std::move(entropies);
            if (part) {
                const auto rho = partial_trace(state, part->parties());
                const auto r = ree(rho, *part, config);
                auto rj = ree_to_json(r);
                if (!with_model) rj.erase("model");
                report["partition"] = part->to_string();
                report["ree"] = std::move(rj);
                csv.push_back({"E.lower", fmt(r.lower)});
                csv.push_back({"E.upper", fmt(r.upper)});
                csv.push_back({"E.gap", fmt(r.gap())});
                csv.push_back({"iterations", std::to_string(r.iterations)});
                csv.push_back({"converged", r.converged ? "true" : "false"});
            }
            emit(g, std::move(report), csv, "measure", elapsed());
            return kExitPass;
        }

        if (*run_cmd) {
            Protocol protocol;
            if (protocol_file == "fuzz") {
                const auto layout = PartyLayout::qubits({"A", "B", "C"}, g.max_dim);
                protocol = random_protocol(layout, rounds, g.seed);
            } else {
                std::ifstream in(protocol_file);
                if (!in) throw std::invalid_argument("cannot open protocol file " + protocol_file);
                protocol = protocol_from_json(Json::parse(in), g.max_dim);
            }
            RunOptions options;
            options.ree_config = config;
            for (const auto& s : split_texts) options.splits.push_back(Partition::parse(s));
            if (audit && options.splits.empty()) options.splits = default_splits(protocol.initial.layout().parties());
            const auto result = run(protocol, options);
            Json report = {{"command", "run"}, {"protocol", protocol.name}, {"provenance", provenance}};
            if (emit_protocol || protocol_file == "fuzz") report["protocol_json"] = protocol_to_json(protocol);
            report["leaves"] = result.leaves.size();
            report["ledger"] = ledger_to_json(result.ledger);
            int code = kExitPass;
            if (audit) {
                auto outcome = audit_all(result.ledger, options.splits);
                report["audits"] = std::move(outcome.json);
                report["verdict"] = outcome.code == kExitPass ? "pass"
                                    : outcome.code == kExitViolation ? "violation"
                                                                      : "indeterminate";
                code = outcome.code;
            }
            emit(g, std::move(report), ledger_csv(result.ledger), "run", elapsed());
            return code;
        }

        if (*rates) {
            const auto state = parse_state(state_spec, alpha2, g.max_dim);
            const auto n = state.layout().party_count();
            Json report = {{"command", "rates"}, {"state", state_spec}, {"provenance", provenance}};
            std::vector<std::vector<std::string>> csv{{"quantity", "value"}};
            int code = kExitPass;
            if (n == 3) {
                const auto profile = profile_of(state, config);
                const auto sol = solve_ghz_singlet_rates(profile);
                double widths = 0.0;
                for (const auto& p : profile.pair_ree) widths += p.bracket.width();
                report["profile"] = profile_to_json(profile);
                report["solution"] = rates_to_json(sol);
                report["singlet_matching"] = matching_to_json(singlet_matching_lp(profile));
                code = widths > kDecideTol ? kExitIndeterminate : sol.feasible ? kExitPass : kExitViolation;
                csv.push_back({"g", fmt(sol.g)});
                for (const auto& [name, v] : sol.s) csv.push_back({"s_" + name, fmt(v)});
                csv.push_back({"residual", fmt(sol.residual)});
                csv.push_back({"tolerance", fmt(sol.tolerance)});
                csv.push_back({"feasible", sol.feasible ? "true" : "false"});
            } else if (n == 4) {
                const auto profile = profile_of(state, config, false);
                const auto m = singlet_matching_lp(profile);
                report["profile"] = profile_to_json(profile);
                report["singlet_matching"] = matching_to_json(m);
                code = m.feasible ? kExitPass : kExitViolation;
                csv.push_back({"feasible", m.feasible ? "true" : "false"});
                if (m.certificate) csv.push_back({"certificate", "\"" + m.certificate->explanation + "\""});
            } else {
                throw std::invalid_argument("rates: needs a 3- or 4-party state");
            }
            report["verdict"] = code == kExitPass ? "feasible" : code == kExitViolation ? "infeasible" : "indeterminate";
            emit(g, std::move(report), csv, "rates", elapsed());
            return code;
        }

        if (*concentrate) {
            const double a2 = *alpha2;
            if (!(a2 > 0.0 && a2 < 1.0)) throw std::invalid_argument("--alpha2 must lie in (0, 1)");
            const auto outcomes = concentrate_phi1(std::sqrt(a2), copies);
            const double y = expected_yield(outcomes);
            const double bound = copies * binary_entropy(a2);
            Json report = {{"command", "concentrate"},
                           {"alpha2", a2},
                           {"n", copies},
                           {"outcomes", concentration_to_json(outcomes)},
                           {"expected_yield", y},
                           {"yield_per_copy", y / copies},
                           {"entropy_bound", bound}};
            if (copies <= 4) {
                const auto dense = concentrate_phi1_dense(std::sqrt(a2), copies);
                report["dense_check"] = {{"expected_yield", dense.expected_yield},
                                         {"difference", std::abs(dense.expected_yield - y)},
                                         {"max_state_error", dense.max_state_error}};
            }
            std::vector<std::vector<std::string>> csv{{"k", "probability", "rank", "bits"}};
            for (const auto& o : outcomes)
                csv.push_back({std::to_string(o.weight), fmt(o.probability), std::to_string(o.rank), fmt(o.ghz_yield_bits)});
            emit(g, std::move(report), csv, "concentrate", elapsed());
            return y <= bound + 1e-12 ? kExitPass : kExitViolation;
        }

        if (*fuzz) {
            std::vector<std::string> labels = default_party_labels(parties);
            Json runs = Json::array();
            std::vector<std::vector<std::string>> csv{{"seed", "rounds", "leaves", "checks", "indeterminate", "violations"}};
            int checks = 0, indeterminate = 0, violations = 0;
            for (int i = 0; i < count; ++i) {
                const auto seed = g.seed + static_cast<std::uint64_t>(i);
                const int r = 1 + static_cast<int>(seed % static_cast<std::uint64_t>(rounds));
                const auto protocol = random_protocol(PartyLayout::qubits(labels, g.max_dim), r, seed);
                RunOptions options;
                options.ree_config = config;
                options.splits = default_splits(labels);
                const auto result = run(protocol, options);
                const auto outcome = audit_all(result.ledger, options.splits);
                checks += outcome.checks;
                indeterminate += outcome.indeterminate;
                violations += outcome.violations;
                runs.push_back({{"seed", seed}, {"rounds", r}, {"leaves", result.leaves.size()},
                                {"checks", outcome.checks}, {"indeterminate", outcome.indeterminate},
                                {"violations", outcome.violations}});
                csv.push_back({std::to_string(seed), std::to_string(r), std::to_string(result.leaves.size()),
                               std::to_string(outcome.checks), std::to_string(outcome.indeterminate),
                               std::to_string(outcome.violations)});
                if (g.verbose) std::cerr << "seed " << seed << ": " << outcome.violations << " violations\n";
            }
            const double rate = checks ? static_cast<double>(indeterminate) / checks : 0.0;
            Json report = {{"command", "fuzz"}, {"provenance", provenance}, {"count", count},
                           {"checks", checks}, {"indeterminate", indeterminate}, {"indeterminate_rate", rate},
                           {"violations", violations}, {"runs", std::move(runs)}};
            const int code = violations ? kExitViolation : rate > 0.10 ? kExitIndeterminate : kExitPass;
            report["verdict"] = code == kExitPass ? "pass" : code == kExitViolation ? "violation" : "indeterminate";
            emit(g, std::move(report), csv, "fuzz", elapsed());
            return code;
        }
    } catch (const Json::exception& e) {
        std::cerr << "error: malformed JSON: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
