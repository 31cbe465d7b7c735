#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "memtrack/io.hpp"
#include "memtrack/log.hpp"
#include "memtrack/metrics.hpp"
#include "memtrack/render.hpp"
#include "memtrack/scenario.hpp"
#include "memtrack/tracker.hpp"
#include "memtrack/version.hpp"

namespace {

using namespace memtrack;

bool is_config_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError:
        case ErrorCode::UnknownKey:
        case ErrorCode::RangeViolation:
        case ErrorCode::UnknownArchetype:
        case ErrorCode::InvalidWindow:
            return true;
        default:
            return false;
    }
}

struct RunOutput {
    RunRecord record;
    GroundTruth gt;
};

RunOutput execute_run(ScenarioConfig scenario, TrackerConfig tracker, PolicyKind policy,
                      std::uint64_t seed) {
    scenario.seed = seed;
    tracker.encoder_noise_seed = seed;
    tracker.policy.kind = policy;
    RunOutput out;
    out.gt = generate(scenario);
    std::vector<FrameInput> stream = make_stream(out.gt, scenario);
    out.record = run(stream, tracker);
    out.record.manifest.digest = config_digest(scenario, tracker);
    out.record.manifest.seed = seed;
    out.record.manifest.policy = policy;
    out.record.manifest.version = kToolVersion;
    out.record.manifest.created_at = utc_now_iso8601();
    return out;
}

std::vector<double> parse_alpha_list(const std::string& text) {
    if (text.empty()) return default_alpha_set();
    std::vector<double> alphas;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        std::string item = text.substr(pos, comma - pos);
        try {
            std::size_t used = 0;
            double alpha = std::stod(item, &used);
            if (used != item.size() || !(alpha > 0.0 && alpha <= 1.0)) {
                throw std::invalid_argument(item);
            }
            alphas.push_back(alpha);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, "bad alpha '" + item + "'");
        }
        pos = comma + 1;
    }
    return alphas;
}

int cmd_run(const std::string& config_path, const std::string& policy_name, std::uint64_t seed,
            const std::string& out_path, const std::string& gt_out_path) {
    ParsedConfig cfg = parse_config(config_path);
    PolicyKind policy = policy_kind_from_name(policy_name);
    RunOutput out = execute_run(cfg.scenario, cfg.tracker, policy, seed);
    write_run(out.record, out_path);
    if (!gt_out_path.empty()) write_gt(out.gt, gt_out_path);
    log_info("wrote " + std::to_string(out.record.frames.size()) + " frames to " + out_path);
    return 0;
}

int cmd_compare(const std::string& archetype_name, int seeds, std::uint64_t seed_base,
                const std::string& out_path, int resolution) {
    std::vector<CompareRow> rows;
    CompareRow means[2];
    for (PolicyKind policy : {PolicyKind::Coupled, PolicyKind::Decoupled}) {
        for (int s = 0; s < seeds; ++s) {
            std::uint64_t seed = seed_base + static_cast<std::uint64_t>(s);
            ArchetypePreset preset = archetype(archetype_name, seed);
            RunOutput out = execute_run(preset.scenario, preset.tracker, policy, seed);
            MetricsReport report = evaluate(out.record, out.gt, default_alpha_set(), resolution);
            rows.push_back(CompareRow::from_report(archetype_name, policy_kind_name(policy),
                                                   std::to_string(seed), report));
            CompareRow& acc = means[policy == PolicyKind::Coupled ? 0 : 1];
            acc.hota += report.hota / seeds;
            acc.deta += report.deta / seeds;
            acc.assa += report.assa / seeds;
            acc.j += report.j / seeds;
            acc.f += report.f / seeds;
            acc.idsw += static_cast<double>(report.idsw) / seeds;
        }
    }
    for (int k = 0; k < 2; ++k) {
        means[k].archetype = archetype_name;
        means[k].policy = k == 0 ? "coupled" : "decoupled";
        means[k].seed = "mean";
    }
    CompareRow delta;
    delta.archetype = archetype_name;
    delta.policy = "delta";
    delta.hota = means[1].hota - means[0].hota;
    delta.deta = means[1].deta - means[0].deta;
    delta.assa = means[1].assa - means[0].assa;
    delta.j = means[1].j - means[0].j;
    delta.f = means[1].f - means[0].f;
    delta.idsw = means[1].idsw - means[0].idsw;
    rows.push_back(means[0]);
    rows.push_back(means[1]);
    rows.push_back(delta);
    write_text_file(out_path, compare_csv(rows));
    log_info("wrote " + std::to_string(rows.size()) + " rows to " + out_path);
    return 0;
}

int cmd_sweep(const std::string& densities_text, int seeds, std::uint64_t seed_base,
              const std::string& out_path, int resolution) {
    std::vector<int> densities;
    std::size_t pos = 0;
    while (pos < densities_text.size()) {
        std::size_t comma = densities_text.find(',', pos);
        if (comma == std::string::npos) comma = densities_text.size();
        std::string item = densities_text.substr(pos, comma - pos);
        try {
            std::size_t used = 0;
            int n = std::stoi(item, &used);
            if (used != item.size() || n < 1) throw std::invalid_argument(item);
            densities.push_back(n);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, "bad density '" + item + "'");
        }
        pos = comma + 1;
    }
    if (densities.empty()) {
        throw Error(ErrorCode::RangeViolation, "no densities given");
    }
    std::vector<DensitySample> samples;
    for (int n : densities) {
        std::string name = "density(" + std::to_string(n) + ")";
        for (PolicyKind policy : {PolicyKind::Coupled, PolicyKind::Decoupled}) {
            for (int s = 0; s < seeds; ++s) {
                std::uint64_t seed = seed_base + static_cast<std::uint64_t>(s);
                ArchetypePreset preset = archetype(name, seed);
                RunOutput out = execute_run(preset.scenario, preset.tracker, policy, seed);
                DensitySample sample;
                sample.num_targets = n;
                sample.policy = policy;
                sample.seed = seed;
                sample.report = evaluate(out.record, out.gt, default_alpha_set(), resolution);
                samples.push_back(std::move(sample));
            }
        }
    }
    write_text_file(out_path, sweep_csv(density_gap(samples)));
    return 0;
}

int cmd_eval(const std::string& run_path, const std::string& gt_path, const std::string& alphas,
             int resolution) {
    RunRecord record = read_run(run_path);
    GroundTruth gt = read_gt(gt_path);
    MetricsReport report = evaluate(record, gt, parse_alpha_list(alphas), resolution);
    std::fputs(eval_csv(report).c_str(), stdout);
    return 0;
}

int cmd_render(const std::string& run_path, const std::string& gt_path, const std::string& outdir,
               int resolution) {
    RunRecord record = read_run(run_path);
    GroundTruth gt = read_gt(gt_path);
    render_run(record, gt, outdir, resolution);
    log_info("rendered " + std::to_string(record.frames.size()) + " frames into " + outdir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"memtrack: deterministic memory-selection tracking testbed"};
    app.require_subcommand(1);

    std::string config_path, policy_name = "decoupled", out_path, gt_out_path;
    std::uint64_t seed = 0, seed_base = 0;
    std::string archetype_name, densities, run_path, gt_path, alphas, outdir;
    int seeds = 20, resolution = 512;

    CLI::App* c_run = app.add_subcommand("run", "execute one tracked run");
    c_run->add_option("--config", config_path, "config file path")->required();
    c_run->add_option("--policy", policy_name, "coupled|decoupled")->required();
    c_run->add_option("--seed", seed, "scenario + encoder seed")->required();
    c_run->add_option("--out", out_path, "run record output path")->required();
    c_run->add_option("--gt-out", gt_out_path, "also write the ground truth here");

    CLI::App* c_compare = app.add_subcommand("compare", "both policies over an archetype");
    c_compare->add_option("--archetype", archetype_name, "archetype name")->required();
    c_compare->add_option("--seeds", seeds, "number of seeds");
    c_compare->add_option("--seed-base", seed_base, "first seed");
    c_compare->add_option("--out", out_path, "CSV output path")->required();
    c_compare->add_option("--resolution", resolution, "boundary raster resolution");

    CLI::App* c_sweep = app.add_subcommand("sweep", "density sweep of both policies");
    c_sweep->add_option("--densities", densities, "comma list, e.g. 3,8,10")->required();
    c_sweep->add_option("--seeds", seeds, "number of seeds");
    c_sweep->add_option("--seed-base", seed_base, "first seed");
    c_sweep->add_option("--out", out_path, "CSV output path")->required();
    c_sweep->add_option("--resolution", resolution, "boundary raster resolution");

    CLI::App* c_eval = app.add_subcommand("eval", "metrics of a stored run");
    c_eval->add_option("--run", run_path, "run record path")->required();
    c_eval->add_option("--gt", gt_path, "ground truth path")->required();
    c_eval->add_option("--alpha", alphas, "comma list of IoU thresholds");
    c_eval->add_option("--resolution", resolution, "boundary raster resolution");

    CLI::App* c_render = app.add_subcommand("render", "draw a stored run as P6 frames");
    c_render->add_option("--run", run_path, "run record path")->required();
    c_render->add_option("--gt", gt_path, "ground truth path")->required();
    c_render->add_option("--outdir", outdir, "output directory")->required();
    c_render->add_option("--resolution", resolution, "image resolution")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help() << std::flush;
        return 1;
    }

    try {
        if (app.got_subcommand(c_run)) {
            return cmd_run(config_path, policy_name, seed, out_path, gt_out_path);
        }
        if (app.got_subcommand(c_compare)) {
            return cmd_compare(archetype_name, seeds, seed_base, out_path, resolution);
        }
        if (app.got_subcommand(c_sweep)) {
            return cmd_sweep(densities, seeds, seed_base, out_path, resolution);
        }
        if (app.got_subcommand(c_eval)) {
            return cmd_eval(run_path, gt_path, alphas, resolution);
        }
        if (app.got_subcommand(c_render)) {
            return cmd_render(run_path, gt_path, outdir, resolution);
        }
    } catch (const memtrack::Error& e) {
        std::cerr << "memtrack: " << e.what() << std::endl;
        return is_config_error(e.code()) ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "memtrack: " << e.what() << std::endl;
        return 2;
    }
    return 0;
}
