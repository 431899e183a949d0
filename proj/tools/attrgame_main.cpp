// Command-line front end: attribution runs, Hellinger comparisons, sweeps,
// the oracle/property check suite, and synthetic-net generation.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "attrgame/checks.hpp"
#include "attrgame/errors.hpp"
#include "attrgame/rand_harness.hpp"
#include "attrgame/routing_game.hpp"
#include "attrgame/stopping_game.hpp"

using nlohmann::json;
using namespace attrgame;

namespace {

constexpr int kExitProperty = 1;
constexpr int kExitSchema = 2;
constexpr int kExitConfig = 3;
constexpr int kExitTopology = 4;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Vec load_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path + ": cannot open file");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw SchemaError(path + ": invalid JSON (" + e.what() + ")");
    }
    if (!j.is_object() || !j.contains("x") || !j.at("x").is_array())
        throw SchemaError(path + ": /x: expected an array of numbers");
    Vec x;
    for (size_t i = 0; i < j.at("x").size(); ++i) {
        const json& v = j.at("x")[i];
        if (!v.is_number()) throw SchemaError(path + ": /x/" + std::to_string(i) + ": not a number");
        x.push_back(v.get<double>());
    }
    return x;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError(path + ": cannot open file for writing");
    out << j.dump(2) << "\n";
}

// Every run writes a manifest next to its results for reproducibility.
void write_manifest(const std::string& out_path, const std::string& command, const json& config) {
    if (out_path.empty()) return;
    json m;
    m["command"] = command;
    m["config"] = config;
    m["output"] = out_path;
    write_json(out_path + ".manifest.json", m);
}

struct AttributeArgs {
    std::string net_path, input_path, out_path, csv_path;
    std::string game = "sg";
    RGConfig cfg;
    std::string gate = "hard";
    double theta = 1.0;
    double seed_mass = 0.0;
    bool seed_mass_set = false;
};

int cmd_attribute(const AttributeArgs& a, const std::string& cmdline) {
    NetSpec net = load_net(a.net_path);
    Vec x = load_input(a.input_path);
    json out;
    out["net"] = a.net_path;
    out["input"] = a.input_path;
    json cfg_json{{"game", a.game}};
    if (a.game == "sg") {
        SGKernel k;
        if (a.gate == "hard")
            k = build_sg(net, x);
        else if (a.gate == "softplus")
            k = build_sg_softplus(net, x, a.theta);
        else if (a.gate == "probit")
            k = sg_probit_gate(net, x);
        else
            throw ConfigError("--gate must be hard, softplus or probit");
        OccupationResult occ = sg_occupation(k, k.start());
        out["f"] = forward(net, x).output;
        out["gradient"] = occ.gradient;
        json gm;
        for (const auto& [key, v] : occ.gamma) gm[to_string(key)] = v;
        out["gamma"] = std::move(gm);
        cfg_json["gate"] = a.gate;
        cfg_json["theta"] = a.theta;
    } else if (a.game == "rg") {
        RGConfig cfg = a.cfg;
        if (a.gate == "probit")
            cfg.gate = RGGateKind::Probit;
        else if (a.gate != "hard")
            throw ConfigError("--gate must be hard or probit for the routing game");
        RGAttribution att = a.seed_mass_set ? rg_attribution(net, x, cfg, a.seed_mass)
                                            : rg_attribution(net, x, cfg);
        out["f"] = att.rel.fx;
        out["seed_mass"] = att.rel.seed;
        json rel = json::array();
        for (size_t n = 0; n < att.rel.node_rel.size(); ++n)
            rel.push_back(json{{"layer", n}, {"values", att.rel.node_rel[n]}});
        out["relevance"] = std::move(rel);
        json gm;
        for (const auto& [key, v] : att.gamma) gm[to_string(key)] = v;
        out["gamma"] = std::move(gm);
        cfg_json["alpha"] = cfg.alpha;
        cfg_json["beta"] = cfg.beta;
        cfg_json["eps"] = cfg.epsilon;
        cfg_json["tau"] = cfg.tau;
        cfg_json["lambda"] = cfg.lambda;
        cfg_json["sigma2"] = cfg.sigma2;
        cfg_json["lambda_sm"] = cfg.lambda_sm;
        cfg_json["lambda_ent"] = cfg.lambda_ent;
        cfg_json["gate"] = a.gate;
        if (!a.csv_path.empty()) {
            std::ofstream csv(a.csv_path);
            csv << "pixel,relevance\n";
            for (size_t i = 0; i < att.rel.node_rel[0].size(); ++i)
                csv << i << "," << fmt17(att.rel.node_rel[0][i]) << "\n";
        }
    } else {
        throw ConfigError("--game must be sg or rg");
    }
    if (!a.out_path.empty()) {
        write_json(a.out_path, out);
        write_manifest(a.out_path, cmdline, cfg_json);
    } else {
        std::cout << out.dump(2) << "\n";
    }
    return 0;
}

struct HellingerArgs {
    std::string net_a, net_b, input_path, out_path, dump_mp;
    std::string game = "sg";
    RGConfig cfg;
    bool conditioned = false;
    bool per_pixel = false;
    bool perm = false;
    int max_width = 6;
};

int cmd_hellinger(const HellingerArgs& a, const std::string& cmdline) {
    NetSpec na = load_net(a.net_a);
    NetSpec nb = load_net(a.net_b);
    Vec x = load_input(a.input_path);
    LayeredMP ma, mb;
    if (a.game == "sg") {
        ma = sg_trajectory_mp(na, x);
        mb = sg_trajectory_mp(nb, x);
    } else if (a.game == "rg") {
        ma = rg_trajectory_mp(na, x, a.cfg);
        mb = rg_trajectory_mp(nb, x, a.cfg);
    } else {
        throw ConfigError("--game must be sg or rg");
    }
    HellingerResult hr = hellinger_backward(ma, mb);
    json out;
    out["bc"] = hr.bc;
    out["h"] = hr.h;
    out["H"] = hr.h0();
    out["Z_A"] = hr.z_a;
    out["Z_B"] = hr.z_b;
    if (a.per_pixel) {
        json px = json::array();
        for (size_t s = 0; s < hr.h2.size(); ++s)
            px.push_back(json{{"state", state_label(ma.states[0][s])},
                              {"h2", hr.h2[s]},
                              {"h2_marg", hr.h2_marg[s]},
                              {"frac", hr.frac[s]}});
        out["per_pixel"] = std::move(px);
        out["h2_cemetery"] = hr.h2_cem;
    }
    if (a.conditioned) {
        ConditionedSurvival cs = conditioned_survival(ma, mb);
        out["H_surv"] = cs.h_surv;
        out["H_surv_posthoc"] = cs.h_surv_posthoc;
        out["h2_surv"] = cs.h2_surv;
    }
    if (a.perm) {
        PermSearch ps = perm_invariant_hellinger(ma, mb, a.max_width);
        out["H_perm"] = ps.h_perm;
        out["perm"] = ps.perms;
    }
    if (!a.dump_mp.empty()) {
        write_json(a.dump_mp + ".A.json", ma.to_json());
        write_json(a.dump_mp + ".B.json", mb.to_json());
    }
    if (!a.out_path.empty()) {
        write_json(a.out_path, out);
        write_manifest(a.out_path, cmdline, json{{"game", a.game}});
    } else {
        std::cout << out.dump(2) << "\n";
    }
    return 0;
}

struct SweepArgs {
    std::string net_path, inputs_dir, out_path;
    std::string mode = "cascade";
    std::vector<std::uint64_t> seeds = {1};
    std::vector<double> sigmas = {0.0, 0.05, 0.1, 0.2, 0.5, 1.0};
    int draws = 8;
    RGConfig cfg;
    bool serial = false;
};

int cmd_sweep(const SweepArgs& a, const std::string& cmdline) {
    NetSpec net = load_net(a.net_path);
    std::vector<Vec> inputs;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(a.inputs_dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) inputs.push_back(load_input(f.string()));
    if (inputs.empty()) throw ConfigError(a.inputs_dir + ": no .json inputs found");

    RunMode mode = a.serial ? RunMode::Serial : RunMode::Parallel;
    SweepResult res;
    if (a.mode == "cascade") {
        res = randomization_sweep(net, inputs, a.cfg, a.seeds, mode);
    } else if (a.mode == "noise") {
        res = input_noise_sweep(net, inputs[0], a.sigmas, a.cfg, a.seeds[0], a.draws, mode);
    } else {
        throw ConfigError("--mode must be cascade or noise");
    }
    if (!a.out_path.empty()) {
        std::ofstream out(a.out_path);
        res.write_csv(out);
        write_manifest(a.out_path, cmdline, json{{"mode", a.mode}, {"seeds", a.seeds}});
    } else {
        res.write_csv(std::cout);
    }
    return 0;
}

int cmd_check(const CheckOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<CheckResult> results = run_checks(opt);
    int failed = 0;
    for (const CheckResult& r : results) {
        if (!r.pass) ++failed;
        std::printf("[%s] %-10s %-32s max_dev=%-12.3g tol=%-8.3g %s\n", r.pass ? "PASS" : "FAIL",
                    r.suite.c_str(), r.name.c_str(), r.max_dev, r.tolerance, r.note.c_str());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d/%zu properties passed in %.2fs\n", static_cast<int>(results.size()) - failed,
                results.size(), secs);
    return failed == 0 ? 0 : kExitProperty;
}

struct GenArgs {
    std::string widths = "3,4,1";
    std::string activation = "relu";
    double theta = 1.0;
    bool with_skip = false, with_maxpool = false, with_attention = false;
    std::uint64_t seed = 7;
    std::string out_path;
};

int cmd_gen_net(const GenArgs& a, const std::string& cmdline) {
    GenNetOptions o;
    std::stringstream ss(a.widths);
    std::string tok;
    while (std::getline(ss, tok, ',')) o.widths.push_back(std::stoi(tok));
    if (a.activation == "relu")
        o.act = {Activation::ReLU, 1.0};
    else if (a.activation == "gelu")
        o.act = {Activation::Gelu, 1.0};
    else if (a.activation == "softplus")
        o.act = {Activation::Softplus, a.theta};
    else
        throw ConfigError("--activation must be relu, softplus or gelu");
    o.with_skip = a.with_skip;
    o.with_maxpool = a.with_maxpool;
    o.with_attention = a.with_attention;
    NetSpec net = gen_net(o, a.seed);
    if (!a.out_path.empty()) {
        save_net(net, a.out_path);
        write_manifest(a.out_path, cmdline, json{{"seed", a.seed}, {"widths", a.widths}});
    } else {
        std::cout << net_to_json(net).dump(2) << "\n";
    }
    return 0;
}

void add_rg_flags(CLI::App* cmd, RGConfig& cfg, std::string* gate) {
    cmd->add_option("--alpha", cfg.alpha, "stream balance alpha");
    cmd->add_option("--beta", cfg.beta, "stream balance beta");
    cmd->add_option("--eps", cfg.epsilon, "outside-option stabiliser");
    cmd->add_option("--tau", cfg.tau, "myopic Gibbs temperature");
    cmd->add_option("--lambda", cfg.lambda, "activation-side risk aversion (<= 0)");
    cmd->add_option("--sigma2", cfg.sigma2, "ADF input variance");
    cmd->add_option("--lambda-sm", cfg.lambda_sm, "attention-logit shift (<= 0)");
    cmd->add_option("--lambda-ent", cfg.lambda_ent, "fan-in entropy bias (>= 0)");
    if (gate) cmd->add_option("--gate", *gate, "hard | probit (rg) / hard | softplus | probit (sg)");
}

}  // namespace

int main(int argc, char** argv) {
    std::string cmdline;
    for (int i = 0; i < argc; ++i) {
        if (i) cmdline += ' ';
        cmdline += argv[i];
    }

    CLI::App app{"backward-attribution games and Hellinger trajectory distances"};
    app.require_subcommand(1);

    AttributeArgs at;
    CLI::App* attr = app.add_subcommand("attribute", "gradient / relevance maps for one input");
    attr->add_option("net", at.net_path)->required();
    attr->add_option("input", at.input_path)->required();
    attr->add_option("--game", at.game, "sg | rg");
    add_rg_flags(attr, at.cfg, &at.gate);
    attr->add_option("--theta", at.theta, "softplus temperature for --gate softplus");
    attr->add_option("--seed-mass", at.seed_mass, "override the f(x) relevance seed")
        ->each([&](const std::string&) { at.seed_mass_set = true; });
    attr->add_option("-o,--out", at.out_path);
    attr->add_option("--csv", at.csv_path, "input relevance map as CSV");

    HellingerArgs he;
    CLI::App* hel = app.add_subcommand("hellinger", "trajectory distance between two nets");
    hel->add_option("netA", he.net_a)->required();
    hel->add_option("netB", he.net_b)->required();
    hel->add_option("input", he.input_path)->required();
    hel->add_option("--game", he.game, "sg | rg");
    add_rg_flags(hel, he.cfg, nullptr);
    hel->add_flag("--conditioned", he.conditioned, "also report H_surv");
    hel->add_flag("--per-pixel", he.per_pixel, "emit the terminal disagreement map");
    hel->add_flag("--perm", he.perm, "brute-force permutation-invariant H");
    hel->add_option("--max-width", he.max_width, "permutation search width guard");
    hel->add_option("--dump-mp", he.dump_mp, "write both layered MPs as JSON");
    hel->add_option("-o,--out", he.out_path);

    SweepArgs sw;
    CLI::App* swp = app.add_subcommand("sweep", "cascading-randomisation / input-noise sweeps");
    swp->add_option("net", sw.net_path)->required();
    swp->add_option("inputs", sw.inputs_dir, "directory of {\"x\": [...]} files")->required();
    swp->add_option("--mode", sw.mode, "cascade | noise");
    swp->add_option("--seeds", sw.seeds, "randomisation seeds");
    swp->add_option("--sigmas", sw.sigmas, "noise levels for --mode noise");
    swp->add_option("--draws", sw.draws, "noise draws per sigma");
    add_rg_flags(swp, sw.cfg, nullptr);
    swp->add_flag("--serial", sw.serial, "single-threaded reference path");
    swp->add_option("-o,--out", sw.out_path, "CSV output");

    CheckOptions co;
    CLI::App* chk = app.add_subcommand("check", "run the oracle/property suite");
    chk->add_option("--suite", co.suite, "all | sg | rg | hellinger | adf | attn");
    chk->add_option("--seeds", co.seed, "master seed");
    chk->add_option("--max-width", co.max_width, "permutation search width guard");
    chk->add_flag("--inject-fault", co.inject_fault,
                  "negative control: mis-scale one discount and expect failure");
    bool chk_serial = false;
    chk->add_flag("--serial", chk_serial, "single-threaded reference path");

    GenArgs gn;
    CLI::App* gen = app.add_subcommand("gen-net", "deterministic He-initialised fixture net");
    gen->add_option("--widths", gn.widths, "comma-separated, includes the input width");
    gen->add_option("--activation", gn.activation, "relu | softplus | gelu");
    gen->add_option("--theta", gn.theta, "softplus temperature");
    gen->add_flag("--with-skip", gn.with_skip);
    gen->add_flag("--with-maxpool", gn.with_maxpool);
    gen->add_flag("--with-attention", gn.with_attention);
    gen->add_option("--seed", gn.seed);
    gen->add_option("-o,--out", gn.out_path);

    try {
        app.parse(argc, argv);
        if (attr->parsed()) return cmd_attribute(at, cmdline);
        if (hel->parsed()) return cmd_hellinger(he, cmdline);
        if (swp->parsed()) return cmd_sweep(sw, cmdline);
        if (chk->parsed()) {
            co.mode = chk_serial ? RunMode::Serial : RunMode::Parallel;
            return cmd_check(co);
        }
        if (gen->parsed()) return cmd_gen_net(gn, cmdline);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const TopologyError& e) {
        std::cerr << "topology error: " << e.what() << "\n";
        return kExitTopology;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitProperty;
    }
    return 0;
}
